"""Shared fixtures; the expensive batch runs are session-scoped."""

from dataclasses import replace
from importlib import resources

import pytest

from carbkin import batch, ratedb
from carbkin.chem import AqueousModel
from carbkin.kinetics import ConventionFlag, rate_params_from_pwp


def data_path(name):
    return str(resources.files("carbkin").joinpath(f"data/{name}"))


@pytest.fixture(scope="session")
def default_model():
    return AqueousModel()


@pytest.fixture(scope="session")
def db_default():
    return ratedb.parse_db(data_path("calcite.default"))


@pytest.fixture(scope="session")
def db_published():
    return ratedb.parse_db(data_path("calcite.palandri-as-published"))


@pytest.fixture(scope="session")
def calcite(db_default):
    return db_default.minerals["calcite"]


@pytest.fixture(scope="session")
def run7_config(db_default):
    return batch.load_batch_config(data_path("run7-like.yaml"), db_default)


@pytest.fixture(scope="session")
def run_corrected(run7_config):
    return batch.integrate_batch(run7_config)


@pytest.fixture(scope="session")
def run_pco2(run7_config):
    return batch.integrate_batch(
        replace(run7_config, basis_override=ConventionFlag.PARTIAL_PRESSURE_CO2)
    )


@pytest.fixture(scope="session")
def run_pwp(run7_config):
    return batch.integrate_batch(
        replace(run7_config, rate_model=batch.RateModelKind.PWP)
    )


@pytest.fixture(scope="session")
def run_derived_palandri(run7_config, calcite):
    """Palandri rate law fed with the mechanism-model forward constants."""
    entry = replace(calcite, palandri=rate_params_from_pwp(calcite.pwp))
    return batch.integrate_batch(replace(run7_config, mineral=entry))


@pytest.fixture(scope="session")
def run_halved_tolerance(run7_config):
    cfg = replace(
        run7_config,
        rel_tol=run7_config.rel_tol / 2,
        abs_tol=run7_config.abs_tol / 2,
    )
    return batch.integrate_batch(cfg)


@pytest.fixture(scope="session")
def run_closed(run7_config):
    return batch.integrate_batch(
        replace(run7_config, system=batch.SystemMode.CLOSED, t_end=5000.0)
    )
