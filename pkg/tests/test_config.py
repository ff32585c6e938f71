import logging

import pytest

from spde_sdk.config import (
    DEFAULT_SEED,
    SEED_ENV,
    ExperimentConfig,
    apply_overrides,
    coerce_value,
    load_config,
    parse_config_text,
)
from spde_sdk.errors import ReportError, ValidationError
from spde_sdk.noise_spectra import WhiteNoise


def test_defaults_validate():
    cfg = load_config(env={})
    assert cfg.T == 0.5
    assert cfg.gamma == 0.7
    assert cfg.modes == (16, 32, 64, 128)
    assert cfg.taus == (1 / 16, 1 / 32, 1 / 64, 1 / 128)
    assert cfg.reference_tau == 2.0 ** -8
    assert cfg.samples == 200
    assert cfg.ito_samples == 10_000
    assert cfg.master_seed == DEFAULT_SEED
    assert isinstance(cfg.noise_spectrum(), WhiteNoise)


def test_file_environment_and_override_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# white noise study\n"
        "spectrum = power:0.5\n"
        "modes = 8, 16, 32   # three resolutions\n"
        "taus = 1/8, 1/16\n"
        "master_seed = 11\n"
        "samples = 10\n"
    )
    cfg = load_config(str(path), env={})
    assert cfg.spectrum == "power:0.5"
    assert cfg.modes == (8, 16, 32)
    assert cfg.taus == (0.125, 0.0625)
    assert cfg.master_seed == 11

    cfg = load_config(str(path), env={SEED_ENV: "0x10"})
    assert cfg.master_seed == 16

    cfg = load_config(str(path), env={SEED_ENV: "16"}, master_seed=5, samples=None)
    assert cfg.master_seed == 5
    assert cfg.samples == 10


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("colour = blue\n")
    with pytest.raises(ValidationError) as info:
        load_config(str(path), env={})
    assert info.value.key == "colour"
    with pytest.raises(ValidationError):
        parse_config_text("just words")


def test_missing_file():
    with pytest.raises(ReportError):
        load_config("/nonexistent/spde.cfg", env={})


@pytest.mark.parametrize("key, value", [
    ("T", "0"),
    ("gamma", "1.2"),
    ("samples", "0"),
    ("modes", "16, 24"),
    ("taus", "1/16, 1/64"),
    ("variant", "spectral"),
    ("drift", "cubic"),
    ("spectrum", "pink"),
    ("datum", "box"),
    ("gamma", "0.4"),
    ("samples", "many"),
    ("override_gamma", "maybe"),
    ("ito_samples", "1"),
])
def test_invalid_settings_name_their_key(key, value):
    with pytest.raises(ValidationError) as info:
        load_config(env={}, **{key: value})
    assert info.value.key in (key, "gamma", "spectrum", "datum", "drift")


def test_gamma_override_downgrades_to_warning(caplog):
    with caplog.at_level(logging.WARNING):
        cfg = load_config(env={}, gamma="0.4", override_gamma="true")
    assert cfg.gamma == 0.4
    assert "override" in caplog.text


def test_resolved_beta():
    assert ExperimentConfig().resolved_beta() == 0.5
    assert ExperimentConfig(datum="dirac").resolved_beta() == -0.51
    assert ExperimentConfig(spectrum="trace:1.1").resolved_beta() == 1.0
    assert ExperimentConfig(beta=0.25).resolved_beta() == 0.25
    assert coerce_value("beta", "auto") is None


def test_scheme_carries_settings():
    cfg = ExperimentConfig(variant="galerkin", oversample=8, standard_first_step=True)
    scheme = cfg.scheme(32)
    assert scheme.M == 32
    assert scheme.variant == "galerkin"
    assert scheme.oversample == 8
    assert scheme.standard_first_step


def test_fingerprint_ignores_execution_settings():
    base = ExperimentConfig()
    assert base.fingerprint() == apply_overrides(base, workers=4, out="elsewhere.csv").fingerprint()
    assert base.fingerprint() != apply_overrides(base, master_seed=1).fingerprint()
    assert len(base.fingerprint()) == 64


def test_coerce_value():
    assert coerce_value("modes", [4, 8]) == (4, 8)
    assert coerce_value("reference_tau", "1/256") == 2.0 ** -8
    assert coerce_value("master_seed", "0xff") == 255
    assert coerce_value("override_gamma", "yes") is True
    with pytest.raises(ValidationError):
        coerce_value("speed", "1")


def test_to_dict_is_json_friendly():
    data = ExperimentConfig().to_dict()
    assert data["modes"] == [16, 32, 64, 128]
    assert data["beta"] is None
