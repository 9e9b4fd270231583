import pytest

from openvocab import _align_py
from openvocab.corpus import RawDocument, StopList, tokenize_all

try:
    from openvocab import _align as _align_c
except ImportError:  # extension not built
    _align_c = None

KERNELS = [pytest.param(_align_py, id="python"),
           pytest.param(_align_c, id="cython",
                        marks=pytest.mark.skipif(_align_c is None, reason="extension not built"))]


@pytest.fixture(params=KERNELS)
def kernel(request):
    return request.param


@pytest.fixture
def citrus_docs():
    raw = [
        RawDocument("d1", "orenji and remon are kankitsu fruit"),
        RawDocument("d2", "kankitsu orenji juice"),
        RawDocument("d3", "the ozone hole grows"),
        RawDocument("d4", "kanketsu of a story"),
        RawDocument("d5", "benpi remedy"),
    ]
    return tokenize_all(raw, StopList(frozenset({"and", "are", "the", "of", "a"})))
