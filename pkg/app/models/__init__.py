"""Models."""

from .params import ParamStore, init_params, parameter_shapes  # noqa
from .transformer import DualStreamOutput, DualStreamTransformer  # noqa
