import pytest

from causalsim import medic_scenario, model_from_dict


@pytest.fixture(scope="session")
def medic_env():
    return medic_scenario()


@pytest.fixture(scope="session")
def medic_model(medic_env):
    return medic_env.truth


@pytest.fixture()
def chain_model():
    """A -> Y with P(A=1) = 0.5, P(Y=1|A=1) = 0.8, P(Y=1|A=0) = 0.2."""
    return model_from_dict(
        {
            "variables": [
                {"name": "A", "states": ["0", "1"]},
                {"name": "Y", "states": ["0", "1"]},
            ],
            "parents": {"A": [], "Y": ["A"]},
            "cpts": {
                "A": [{"p": [0.5, 0.5]}],
                "Y": [
                    {"given": {"A": "0"}, "p": [0.8, 0.2]},
                    {"given": {"A": "1"}, "p": [0.2, 0.8]},
                ],
            },
        }
    )


@pytest.fixture()
def fair_pair_model():
    """Two independent fair binary variables."""
    return model_from_dict(
        {
            "variables": [
                {"name": "A", "states": ["0", "1"]},
                {"name": "B", "states": ["0", "1"]},
            ],
            "parents": {"A": [], "B": []},
            "cpts": {"A": [{"p": [0.5, 0.5]}], "B": [{"p": [0.5, 0.5]}]},
        }
    )
