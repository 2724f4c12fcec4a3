from typing import Annotated

import numpy as np
from pydantic import BeforeValidator, PlainSerializer


def _as_readonly_array(value) -> np.ndarray:
    array = np.array(value, dtype=float)
    array.setflags(write=False)
    return array


# Float arrays carried by models: copied on validation, read-only afterwards, JSON as lists.
FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_readonly_array),
    PlainSerializer(lambda array: array.tolist(), return_type=list),
]
