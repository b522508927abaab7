"""
Tests for certify module
"""

import pytest

from quantum_curves.certify import (
    COLUMNS,
    CRITERIA,
    CertificationContext,
    certify,
    run_criterion,
)
from quantum_curves.curve import load_curve
from quantum_curves.errors import CheckFailure, QuantumCurveError


@pytest.fixture(scope="module")
def context():
    return CertificationContext(load_curve("catalan"))


def always_fails(ctx):
    raise CheckFailure("demo identity fails", "1/3")


class TestCriteria:
    """Test the criterion catalogue"""

    def test_numbering(self):
        """Test criteria are numbered 1 to 11"""
        assert sorted(CRITERIA) == list(range(1, 12))

    @pytest.mark.parametrize("number", [1, 2, 5])
    def test_quick_criteria(self, number, context):
        """Test criteria that run in seconds"""
        result = run_criterion(number, context)
        assert result.passed, result.residual
        assert result.residual == "0"

    @pytest.mark.slow
    @pytest.mark.parametrize("number", [3, 4, 6, 7, 8, 9, 10, 11])
    def test_remaining_criteria(self, number, context):
        """Test the criteria built on higher invariants"""
        result = run_criterion(number, context)
        assert result.passed, result.residual

    def test_provenance(self, context):
        """Test each row names where its expected value comes from"""
        assert run_criterion(1, context).expected_source == "formula"
        assert run_criterion(5, context).expected_source == "oracle"


class TestFailures:
    """Test failing criteria are reported, not raised"""

    def test_failure_row(self, context, monkeypatch):
        """Test a CheckFailure becomes a FAIL row with its residual"""
        monkeypatch.setitem(CRITERIA, 1, ("demo", always_fails))
        result = run_criterion(1, context)
        assert not result.passed
        assert result.row()["status"] == "FAIL"
        assert result.residual == "1/3"

    def test_failed_report(self, monkeypatch):
        """Test one failing criterion fails the whole report"""
        monkeypatch.setitem(CRITERIA, 1, ("demo", always_fails))
        report = certify(only=[1])
        assert not report.passed
        assert report.table["status"].tolist() == ["FAIL"]


class TestCertify:
    """Test the certification report"""

    def test_columns(self):
        """Test the report layout"""
        report = certify(only=[1])
        assert list(report.table.columns) == COLUMNS
        assert report.passed
        assert report.table["status"].tolist() == ["pass"]

    def test_only_is_sorted(self):
        """Test criteria run in numerical order without repeats"""
        report = certify(only=[5, 1, 5])
        assert report.table["criterion"].tolist() == ["1", "5"]

    def test_timings(self):
        """Test seconds are added only on request"""
        report = certify(only=[1], timings=True)
        assert list(report.table.columns) == COLUMNS + ["seconds"]

    def test_deterministic(self):
        """Test two runs print identical reports"""
        assert certify(only=[1, 2]).to_text() == certify(only=[1, 2]).to_text()

    def test_unknown_criterion(self):
        """Test numbers outside 1..11"""
        with pytest.raises(QuantumCurveError, match="unknown criteria"):
            certify(only=[12])

    @pytest.mark.slow
    def test_full_suite(self):
        """Test all eleven criteria pass on the Catalan curve"""
        report = certify()
        assert report.passed, report.to_text()
        assert len(report.table) == 11
