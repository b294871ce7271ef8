"""Semi-dense RGB-D visual odometry via nearest-neighbour-field registration."""

from .annf import (
    DistanceField,
    NearestNeighbourField,
    build_annf,
    build_distance_field,
    lookup_nn,
    sample_bilinear,
)
from .config import VoConfig, load_config
from .geometry import CameraIntrinsics, Pose, PoseDelta, backproject, cayley_to_rotation, compose, project
from .image import (
    DepthImage,
    GradientImage,
    GrayImage,
    SemiDenseRegion,
    extract_semidense,
    extractor_pipeline,
    gaussian_smooth,
    gradient_kernel5,
    gradient_sobel3,
)
from .mapping import KeyframeMap, build_keyframe_map, foreground_depth
from .pipeline import VisualOdometry, predict_pose, run_sequence
from .registration import (
    RegistrationProblem,
    RegistrationResult,
    gauss_newton_solve,
    gradient_descent_solve,
)
from .robust import SensorModelFit, WeightFunction, fit_sensor_model, update_sigma_tdist, weight

__version__ = "0.1.0"
