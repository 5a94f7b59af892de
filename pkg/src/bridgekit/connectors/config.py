"""Connector configuration and exact trainable-parameter counting."""

from dataclasses import dataclass, field, fields

from ..errors import ConfigError

KINDS = ("FC", "CA", "QF", "SegQF")

# fields that only make sense for particular kinds
_KIND_FIELDS = {
    "FC": {"m", "fc_hidden"},
    "CA": {"s", "n_heads"},
    "QF": {"n_q", "d_q", "n_blocks", "n_heads"},
    "SegQF": {"n_q", "d_q", "n_blocks", "n_heads", "segment_len"},
}
_REQUIRED = {
    "FC": {"m"},
    "CA": {"s"},
    "QF": {"n_q"},
    "SegQF": {"n_q", "segment_len"},
}


@dataclass
class ConnectorConfig:
    """Architecture knobs; exactly the fields of the chosen kind apply.

    Defaults: d_q = d_x (no input projection needed), 4 attention heads,
    2 transformer blocks, FC hidden width 4*d_t.
    """
    kind: str
    d_x: int
    d_t: int
    m: int = None             # FC stacking factor
    fc_hidden: int = None     # FC hidden width; default 4*d_t
    s: int = None             # CA downsampling rate
    n_q: int = None           # QF/SegQF query count
    d_q: int = None           # QF/SegQF query dim; default d_x
    n_blocks: int = 2
    n_heads: int = 4
    segment_len: int = None   # SegQF frames per segment

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown connector kind {self.kind!r}")
        if self.d_x < 1 or self.d_t < 1:
            raise ConfigError(f"d_x={self.d_x}, d_t={self.d_t} must be >= 1")
        allowed = _KIND_FIELDS[self.kind] | {"kind", "d_x", "d_t"}
        defaults = {f.name: f.default for f in fields(self)}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name not in allowed and value != defaults[f.name]:
                raise ConfigError(
                    f"field {f.name!r} does not apply to kind {self.kind}")
        for name in _REQUIRED[self.kind]:
            if getattr(self, name) is None:
                raise ConfigError(f"kind {self.kind} requires field {name!r}")
        if self.kind == "FC":
            if self.m < 1:
                raise ConfigError(f"stacking factor m={self.m} must be >= 1")
            if self.fc_hidden is not None and self.fc_hidden < 1:
                raise ConfigError(f"fc_hidden={self.fc_hidden} must be >= 1")
        if self.kind == "CA" and self.s < 1:
            raise ConfigError(f"downsampling rate s={self.s} must be >= 1")
        if self.kind in ("QF", "SegQF"):
            if self.n_q < 1:
                raise ConfigError(f"n_q={self.n_q} must be >= 1")
            if self.query_dim % self.n_heads != 0:
                raise ConfigError(
                    f"d_q={self.query_dim} not divisible by {self.n_heads} heads")
        if self.kind == "SegQF" and self.segment_len < 1:
            raise ConfigError(f"segment_len={self.segment_len} must be >= 1")
        if self.kind == "CA" and self.d_t % self.n_heads != 0:
            raise ConfigError(
                f"d_t={self.d_t} not divisible by {self.n_heads} heads")

    @property
    def hidden_width(self):
        return self.fc_hidden if self.fc_hidden is not None else 4 * self.d_t

    @property
    def query_dim(self):
        return self.d_q if self.d_q is not None else self.d_x

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)
                if getattr(self, f.name) is not None}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def param_count(config):
    """Exact trainable-parameter count of a connector (frozen E excluded).

    Computed arithmetically from the config; tests cross-check it against
    the element count of an actually constructed connector.
    """
    c = config
    if c.kind == "FC":
        h = c.hidden_width
        return (c.m * c.d_x) * h + h + h * c.d_t + c.d_t
    if c.kind == "CA":
        conv = (c.s * c.d_x) * c.d_x + c.d_x          # kernel-s stride-s conv
        lin = c.d_x * c.d_t + c.d_t                   # map to decoder width
        attn = 4 * (c.d_t * c.d_t + c.d_t)            # q/k/v/out projections
        return conv + lin + attn
    if c.kind in ("QF", "SegQF"):
        dq = c.query_dim
        queries = c.n_q * dq
        self_attn = 4 * (dq * dq + dq)
        cross = (dq * dq + dq) + 2 * (c.d_x * dq + dq) + (dq * dq + dq)
        ffn = dq * (4 * dq) + 4 * dq + (4 * dq) * dq + dq
        norms = 3 * 2 * dq
        out_proj = dq * c.d_t + c.d_t
        return queries + c.n_blocks * (self_attn + cross + ffn + norms) + out_proj
    raise ConfigError(f"unknown connector kind {c.kind!r}")
