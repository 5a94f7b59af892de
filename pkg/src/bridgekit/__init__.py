"""bridgekit: speech-encoder-to-LLM connector architectures at desk scale.

A small experiment kit for training and evaluating the connector module that
sits between a frozen speech encoder and a frozen autoregressive decoder:
fully connected frame stacking, multi-head cross-attention, Q-Former, and
segment-level Q-Former, together with the random-concatenation training
strategy and a WER/deletion-rate evaluation harness.
"""

__version__ = "0.1.0"
