#!/usr/bin/env python
import pytest

from kplume.exceptions import InvalidDispersion, InvalidXi
from kplume.gaussian import GaussianDispersion
from kplume.lattice import FortyFive, NearestNeighbor, SimpleRW
from kplume.model_dispatcher import (
    MODEL_ALIASES,
    MODEL_MAPPER,
    ModelHandler,
    canonical_model,
    lattice_models,
    model_dispatcher,
    models,
)


def test_models():
    assert models == ["ff45", "gauss", "nn", "simple"]
    assert lattice_models == ["ff45", "nn", "simple"]


@pytest.mark.parametrize(
    "key,expected",
    [
        ("simple", SimpleRW),
        ("ff45", FortyFive),
        ("45", FortyFive),
        ("FortyFive", FortyFive),
        ("nearest", NearestNeighbor),
        ("gaussian", GaussianDispersion),
    ],
)
def test_model_dispatcher(key, expected):
    assert model_dispatcher(key) is expected


def test_aliases_are_mapped():
    for alias, target in MODEL_ALIASES.items():
        assert MODEL_MAPPER[alias] is MODEL_MAPPER[target]
        assert canonical_model(alias) == target


def test_unknown_model():
    with pytest.raises(ValueError) as excinfo:
        model_dispatcher("hexagonal")
    assert "currently supported models are" in str(excinfo.value)


def test_model_handler():
    model = ModelHandler(model="simple", alpha=0.1, beta=0.4)
    assert isinstance(model, SimpleRW)
    assert model.params_dict() == {"alpha": 0.1, "beta": 0.4}
    assert ModelHandler(model="nn", xi=0.1, alpha=None).xi == 0.1
    assert isinstance(ModelHandler(model="gauss"), GaussianDispersion)


def test_model_handler_rejects_foreign_params():
    with pytest.raises(ValueError):
        ModelHandler(model="nn", alpha=0.25)


def test_model_handler_validates():
    with pytest.raises(InvalidDispersion):
        ModelHandler(model="ff45", alpha=0.3, beta=0.3)
    with pytest.raises(InvalidXi):
        ModelHandler(model="nn", xi=0.3)
