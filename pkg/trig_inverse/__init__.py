from trig_inverse.characters import enumerate_characters, primitive_part
from trig_inverse.gauss import spectrum
from trig_inverse.trigmat import build_matrix, explicit_inverse, hat_coefficients, is_invertible
from trig_inverse.verify import sweep

__all__ = [
    "build_matrix",
    "enumerate_characters",
    "explicit_inverse",
    "hat_coefficients",
    "is_invertible",
    "primitive_part",
    "spectrum",
    "sweep",
]
