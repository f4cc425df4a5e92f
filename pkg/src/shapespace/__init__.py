"""Shape-space distances and classification for closed planar contours.

Two Riemannian representations of a closed curve — an orthonormal function
pair on a Grassmannian (S1) and the square-root velocity function on a
hypersphere (S2) — plus a shared fixed parameterization, template-distance
features, and the supervised/unsupervised evaluation pipeline.
"""

from .analysis import (
    AnalysisError,
    AnovaResult,
    ClusterResult,
    ConfusionMatrix,
    DistanceMatrix,
    MetricsReport,
    anova_two_way,
    cluster_confusion,
    confusion_from_predictions,
    distance_matrix,
    kmedoids,
    knn_classify,
    lda_classify,
    metrics,
    silhouette,
    stratified_folds,
)
from .contour import (
    CLASS_ORDER,
    NORMAL,
    OTHER,
    SICKLE,
    ContourError,
    NormalizedCurve,
    RawContour,
    check_invariants,
    load_contour_file,
    load_contours,
    normalize,
    parse_label,
    resample_equidistant,
)
from .grassmann import (
    GrassmannError,
    GrassmannPoint,
    JordanAngles,
    basic_map,
    grassmann_distance,
    grassmann_distance_minshift,
    grassmann_geodesic,
    to_grassmann,
)
from .srvf import (
    AlignmentResult,
    SrvfCurve,
    SrvfError,
    from_srvf,
    project_closed,
    sphere_distance,
    srvf_distance_elastic,
    srvf_distance_fixed,
    srvf_geodesic,
    to_srvf,
)
from .templates import (
    FeatureVector,
    TemplateError,
    TemplateSet,
    features_table,
    make_templates,
    template_features,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "AnalysisError",
    "AnovaResult",
    "CLASS_ORDER",
    "ClusterResult",
    "ConfusionMatrix",
    "ContourError",
    "DistanceMatrix",
    "FeatureVector",
    "GrassmannError",
    "GrassmannPoint",
    "JordanAngles",
    "MetricsReport",
    "NORMAL",
    "NormalizedCurve",
    "OTHER",
    "RawContour",
    "SICKLE",
    "SrvfCurve",
    "SrvfError",
    "TemplateError",
    "TemplateSet",
    "anova_two_way",
    "basic_map",
    "check_invariants",
    "cluster_confusion",
    "confusion_from_predictions",
    "distance_matrix",
    "features_table",
    "from_srvf",
    "grassmann_distance",
    "grassmann_distance_minshift",
    "grassmann_geodesic",
    "kmedoids",
    "knn_classify",
    "lda_classify",
    "load_contour_file",
    "load_contours",
    "make_templates",
    "metrics",
    "normalize",
    "parse_label",
    "project_closed",
    "resample_equidistant",
    "silhouette",
    "sphere_distance",
    "srvf_distance_elastic",
    "srvf_distance_fixed",
    "srvf_geodesic",
    "stratified_folds",
    "template_features",
    "to_grassmann",
    "to_srvf",
]
