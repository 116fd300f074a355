"""Controls selection of the proper dispersion class based on the model key."""
from typing import Any, Dict, Type, Union

from kplume.gaussian import GaussianDispersion
from kplume.lattice import FortyFive, NearestNeighbor, SimpleRW
from kplume.lattice.base_lattice import BaseLatticeModel

DispersionModel = Union[BaseLatticeModel, GaussianDispersion]

# The keys of this dictionary are the supported model keys
MODEL_MAPPER_BASE: Dict[str, Type[Any]] = {
    "simple": SimpleRW,
    "ff45": FortyFive,
    "nn": NearestNeighbor,
    "gauss": GaussianDispersion,
}

# Also support alternate names
MODEL_ALIASES = {
    "ff": "ff45",
    "45": "ff45",
    "fortyfive": "ff45",
    "nearest": "nn",
    "gaussian": "gauss",
}

MODEL_MAPPER = MODEL_MAPPER_BASE.copy()
for alias, target in MODEL_ALIASES.items():
    MODEL_MAPPER[alias] = MODEL_MAPPER_BASE[target]

# Parameters each model accepts
MODEL_PARAMS = {
    "simple": ("alpha", "beta"),
    "ff45": ("alpha", "beta"),
    "nn": ("xi",),
    "gauss": ("alpha", "beta"),
}

models = sorted(MODEL_MAPPER_BASE)
models_str = "\n" + "\n".join(models) + "\n"
lattice_models = [key for key in models if issubclass(MODEL_MAPPER_BASE[key], BaseLatticeModel)]


def canonical_model(model: str) -> str:
    """Map an alias to its canonical key; unknown keys raise ValueError."""
    key = model.strip().lower()
    key = MODEL_ALIASES.get(key, key)
    if key not in MODEL_MAPPER_BASE:
        raise ValueError(
            f"Unsupported 'model' {model!r}, currently supported models are: {models_str}"
        )
    return key


def model_dispatcher(model: str) -> Type[Any]:
    """Select the class to be instantiated based on the model key."""
    return MODEL_MAPPER[canonical_model(model)]


def ModelHandler(*args: Any, **kwargs: Any) -> DispersionModel:
    """Factory function selects the proper class and creates object based on model."""
    model = kwargs.pop("model")
    key = canonical_model(model)
    accepted = MODEL_PARAMS[key]
    params = {name: value for name, value in kwargs.items() if value is not None}
    unexpected = sorted(set(params) - set(accepted))
    if unexpected:
        raise ValueError(f"Model {key!r} does not take {unexpected}; accepted: {list(accepted)}")
    ModelClass = MODEL_MAPPER_BASE[key]
    return ModelClass(*args, **params)
