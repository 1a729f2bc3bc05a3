"""Tests for breg models."""

import math

import pytest
from pydantic import ValidationError

from breg.config import Suite
from breg.models import (
    GridSpec,
    MeasureFile,
    PropertyResult,
    Settings,
    SuiteReport,
    generate_report_id,
)


class TestMeasureFile:
    def test_mass_only(self):
        data = MeasureFile(mass=[0.5, 0.5])
        assert data.labels() is None

    def test_labels_are_strings(self):
        data = MeasureFile(support=["a", 2, 3.5], mass=[0.2, 0.3, 0.5])
        assert data.labels() == ("a", "2", "3.5")

    @pytest.mark.parametrize("mass", [[], [-0.1, 1.1], [math.inf]])
    def test_invalid_mass(self, mass):
        with pytest.raises(ValidationError):
            MeasureFile(mass=mass)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError, match="support has 1 labels"):
            MeasureFile(support=["a"], mass=[0.5, 0.5])

    def test_extra_fields_rejected(self):
        with pytest.raises(ValidationError):
            MeasureFile.model_validate({"mass": [1.0], "weights": [1.0]})


class TestGridSpec:
    def test_points(self):
        spec = GridSpec(alpha_min=0.2, alpha_max=2.0, alpha_steps=10, beta_steps=5)
        assert spec.alphas()[0] == 0.2
        assert spec.alphas()[-1] == 2.0
        assert spec.betas().tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert spec.size == 50

    def test_defaults(self):
        spec = GridSpec(alpha_min=0.0, alpha_max=1.0)
        assert spec.size == 2500

    @pytest.mark.parametrize("kwargs", [
        {"alpha_min": 1.0, "alpha_max": 1.0},
        {"alpha_min": 2.0, "alpha_max": 1.0},
        {"alpha_min": 0.0, "alpha_max": 1.0, "alpha_steps": 1},
        {"alpha_min": 0.0, "alpha_max": 1.0, "beta_max": 1.5},
        {"alpha_min": 0.0, "alpha_max": math.inf},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            GridSpec(**kwargs)


class TestSettings:
    def test_defaults(self):
        settings = Settings()
        assert settings.oracle_tol == 1e-9
        assert settings.seed == 0
        assert settings.workers == 1
        assert settings.report_dir is None

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValidationError):
            Settings.model_validate({"tolerance": 1e-6})

    def test_positive_tolerance(self):
        with pytest.raises(ValidationError):
            Settings(oracle_tol=0.0)


class TestSuiteReport:
    def test_passed_and_failures(self):
        report = SuiteReport(suite=Suite.IDENTITIES)
        assert report.passed
        report.results.append(PropertyResult(name="a", passed=True))
        report.results.append(PropertyResult(name="b", passed=False))
        assert not report.passed
        assert [r.name for r in report.failures] == ["b"]

    def test_run_ids_differ(self):
        assert SuiteReport(suite=Suite.LIMITS).run_id != SuiteReport(suite=Suite.LIMITS).run_id
        assert SuiteReport(suite=Suite.LIMITS).run_id.startswith("run_")

    def test_round_trip_through_json(self):
        report = SuiteReport(suite=Suite.ORACLE, results=[PropertyResult(name="x", passed=True, max_deviation=1e-12)])
        restored = SuiteReport.model_validate_json(report.model_dump_json())
        assert restored.suite is Suite.ORACLE
        assert restored.results[0].max_deviation == 1e-12


class TestReportId:
    def test_slug_and_uuid(self):
        report_id = generate_report_id("Counter Example")
        assert report_id.startswith("counter-example-")
        assert len(report_id.rsplit("-", 1)[1]) == 8

    def test_ids_differ(self):
        assert generate_report_id("oracle") != generate_report_id("oracle")
