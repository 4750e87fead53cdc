"""Synthetic transmit aperture ultrasound beamforming toolkit.

Pipeline: transmit-sequence generation (STA / MSTA / PA) -> point-scatterer
RF simulation -> delay-and-sum beamforming (LRI/HRI or line-by-line PA) ->
envelope detection and log compression -> SNR / resolution / side-lobe /
data-transfer metrics.
"""

from .beamform import (
    DelaySplit,
    Image,
    ImageGrid,
    beamform_lri,
    beamform_pa,
    read_interpolated,
    round_trip_delay,
    split_delay,
    synthesize_hri,
)
from .geometry import (
    ArrayGeometry,
    TransmitEvent,
    TransmitSequence,
    element_positions,
    msta_sequence,
    pa_sequence,
    sta_sequence,
)
from .kernels import active_backend
from .metrics import (
    MethodRun,
    RegionSpec,
    TransferModel,
    data_transfer_bytes,
    metric_fwhm,
    metric_sidelobe,
    metric_snr,
    snr_gain_report,
)
from .postproc import envelope, log_compress, to_pgm_bytes
from .simulate import Phantom, PulseModel, RfDataSet, sample_pulse, simulate_rf

__all__ = [
    "ArrayGeometry", "TransmitEvent", "TransmitSequence",
    "element_positions", "sta_sequence", "msta_sequence", "pa_sequence",
    "Phantom", "PulseModel", "RfDataSet", "sample_pulse", "simulate_rf",
    "ImageGrid", "Image", "DelaySplit", "round_trip_delay", "split_delay",
    "read_interpolated", "beamform_lri", "beamform_pa", "synthesize_hri",
    "envelope", "log_compress", "to_pgm_bytes",
    "RegionSpec", "TransferModel", "MethodRun", "metric_snr", "metric_fwhm",
    "metric_sidelobe", "data_transfer_bytes", "snr_gain_report",
    "active_backend",
]

__version__ = "0.1.0"
