import pytest

from src.analysis import ABUNDANCE, SCARCITY, find_eigenvalues, run_pipeline
from src.errors import NotAdmissible, WrongRegime


@pytest.fixture(scope="module")
def scarcity_result(scarcity):
    return run_pipeline(scarcity, 3, SCARCITY)


def test_scarcity_summary(scarcity_result, scarcity_root):
    summary = scarcity_result.summary()
    assert summary["m"] == 3
    assert summary["regime"] == SCARCITY
    assert summary["omega"] == pytest.approx(scarcity_root)
    assert summary["omega_hat"] == pytest.approx(0.3345, abs=1e-10)
    assert summary["normalization_check"] == pytest.approx(0.125, abs=1e-6)
    assert summary["verdict"] is True
    assert summary["I_m"] == pytest.approx(summary["I_m1"] + summary["I_m2"] + summary["I_m3"])
    assert summary["kappa"] is None


def test_to_dict_sections(scarcity_result):
    doc = scarcity_result.to_dict()
    assert set(doc) == {"summary", "certificate", "kernel", "transversality"}
    assert doc["certificate"]["kernel_dimension"] == 1


def test_pipeline_errors(scarcity, abundance):
    with pytest.raises(NotAdmissible):
        run_pipeline(scarcity, 11, SCARCITY)
    with pytest.raises(WrongRegime):
        run_pipeline(abundance, 3, SCARCITY)
    with pytest.raises(ValueError):
        run_pipeline(scarcity, 3, "other")


def test_find_eigenvalues_records_failures(scarcity):
    frame = find_eigenvalues(scarcity, [11, 3], SCARCITY)
    assert list(frame["m"]) == [3, 11]
    assert list(frame["status"]) == ["ok", "NotAdmissible"]


def test_abundance_regime_on_positive_profile(scarcity):
    frame = find_eigenvalues(scarcity, [40], ABUNDANCE)
    assert list(frame["status"]) == ["WrongRegime"]
