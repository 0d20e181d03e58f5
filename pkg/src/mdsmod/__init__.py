"""MDS-coded modulation (MDS-APM / MDS-IQM) over OFDM: codebooks, detectors,
Monte-Carlo BER and closed-form analysis."""

from .modem import ApmScheme, IqmScheme, PlainScheme

__all__ = ["ApmScheme", "IqmScheme", "PlainScheme"]
