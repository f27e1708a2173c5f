"""Hyperspectral honey classification: class transformation, LDA/PCA features,
KNN/SVM classifiers and acquisition-based cross-validation."""

from ._core import (  # noqa: F401
    ArgumentError,
    ConvergenceError,
    FitError,
    HoneyError,
    ParseError,
    ShapeError,
    Dataset,
    FittedPipeline,
    KnnModel,
    LdaModel,
    PcaModel,
    SvmBinaryModel,
    __version__,
    balanced_accuracy,
    brand_pair_p_value,
    class_recall,
    class_specificity,
    cholesky,
    eig_symmetric,
    fit_knn,
    fit_lda,
    fit_pca,
    fit_pipeline,
    fit_svm_binary,
    load_bundle,
    load_csv,
    majority_vote_image,
    make_folds,
    matmul,
    parse_csv,
    run_cv,
    slice_fold,
    student_t_sf,
    transform_classes,
)
