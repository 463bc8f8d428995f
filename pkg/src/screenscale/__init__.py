"""Content-adaptive scaling of screen images with shift-linear interpolation."""

from .baselines import scale_bicubic, scale_bilinear
from .classifier import ClassifierParams, ContentMap, ContentType, classify_image, classify_raster
from .config import Config
from .methods import METHODS, scale_by_method
from .metrics import QualityReport, count_ops, psnr
from .opcount import OpCounter, OpCounts
from .raster import Raster, load_image, round_to_raster, save_image, to_luma
from .sli import OffsetTable, ScaleJob, scale_adaptive, scale_content_adaptive, scale_fixed_sli
from .spectral import CorpusManifest, error_kernel, train_offsets

__version__ = "0.1.0"
