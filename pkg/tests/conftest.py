"""Shared fixtures: zero tables are expensive, so they are built once per session."""

import pytest

from zml.zeros.models import ZeroEntry, ZeroOrigin, ZeroTable
from zml.zeros.scan import scan_zeros

SCAN_TOP = 4100.0


@pytest.fixture(scope="session")
def scanned_table() -> ZeroTable:
    """Every zero of zeta on the critical line with 10 <= gamma <= 4100."""
    return scan_zeros(10.0, SCAN_TOP)


@pytest.fixture
def empty_model() -> ZeroTable:
    """A model table with no zeros at all."""
    return ZeroTable.from_model([], provenance="empty-model")


@pytest.fixture
def offline_model() -> ZeroTable:
    """A model table holding a single synthetic zero 0.8 + 1000i."""
    entry = ZeroEntry(beta=0.8, gamma=1000.0, multiplicity=1, origin=ZeroOrigin.SYNTHETIC)
    return ZeroTable.from_model([entry], provenance="offline-model")
