#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "honeyhsi/classify.hpp"
#include "honeyhsi/cv.hpp"
#include "honeyhsi/dataset.hpp"
#include "honeyhsi/error.hpp"
#include "honeyhsi/features.hpp"
#include "honeyhsi/linalg.hpp"
#include "honeyhsi/metrics.hpp"
#include "honeyhsi/pipeline.hpp"
#include "honeyhsi/special.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace honeyhsi;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix toMatrix(const Array& a) {
    if (a.ndim() == 1) return Matrix(static_cast<std::size_t>(a.shape(0)), 1, {a.data(), a.data() + a.size()});
    if (a.ndim() != 2) throw ShapeError("expected a 1-D or 2-D array");
    return Matrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                  {a.data(), a.data() + a.size()});
}

Array toArray(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

std::vector<double> toVector(const Array& a) { return {a.data(), a.data() + a.size()}; }

py::object toPython(const nlohmann::json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

nlohmann::json fromPython(const py::object& obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

PipelineConfig configFromPython(const py::object& obj) {
    if (obj.is_none()) return {};
    return pipelineConfigFromJson(fromPython(obj));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hyperspectral honey classification core";

    static py::exception<Error> baseError(m, "HoneyError");
    py::register_exception<ArgumentError>(m, "ArgumentError", baseError.ptr());
    py::register_exception<ParseError>(m, "ParseError", baseError.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", baseError.ptr());
    py::register_exception<FitError>(m, "FitError", baseError.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", baseError.ptr());

    // numerics
    m.def("matmul", [](const Array& a, const Array& b) { return toArray(matmul(toMatrix(a), toMatrix(b))); });
    m.def("cholesky", [](const Array& a) { return toArray(cholesky(toMatrix(a))); });
    m.def(
        "eig_symmetric",
        [](const Array& a) {
            const auto r = eigSymmetric(toMatrix(a));
            return py::make_tuple(r.eigenvalues, toArray(r.eigenvectors));
        },
        "Eigenvalues (descending) and unit eigenvectors (columns) of a symmetric matrix.");
    m.def("student_t_sf", &studentTSf, py::arg("t"), py::arg("df"));

    // dataset
    py::class_<LabeledDataset>(m, "Dataset")
        .def_property_readonly("size", &LabeledDataset::size)
        .def("__len__", &LabeledDataset::size)
        .def_property_readonly("class_names", &LabeledDataset::classNames)
        .def_property_readonly("band_count", &LabeledDataset::bandCount)
        .def_property_readonly("labels", [](const LabeledDataset& ds) {
            std::vector<std::string> out;
            for (const auto& inst : ds.instances()) out.push_back(inst.classLabel);
            return out;
        })
        .def_property_readonly("image_ids", [](const LabeledDataset& ds) {
            std::vector<std::string> out;
            for (const auto& inst : ds.instances()) out.push_back(inst.imageId);
            return out;
        })
        .def_property_readonly("acquisitions", [](const LabeledDataset& ds) {
            std::vector<int> out;
            for (const auto& inst : ds.instances()) out.push_back(inst.acquisition);
            return out;
        })
        .def("bands", [](const LabeledDataset& ds) { return toArray(bandMatrix(ds)); });
    m.def("load_csv", [](const std::string& path) { return loadCsv(path); }, py::arg("path"));
    m.def(
        "parse_csv",
        [](const std::string& text) {
            std::istringstream in(text);
            return parseCsv(in);
        },
        py::arg("text"));
    m.def("brand_pair_p_value", &brandPairPValue, py::arg("dataset"), py::arg("origin"), py::arg("brand_a"),
          py::arg("brand_b"));
    m.def("transform_classes", &transformClasses, py::arg("dataset"), py::arg("alpha") = 0.05);
    m.def("make_folds", [] {
        py::list out;
        for (const auto& f : makeFolds()) {
            out.append(py::make_tuple(f.foldIndex, std::vector<int>(f.trainAcquisitions.begin(), f.trainAcquisitions.end()),
                                      std::vector<int>(f.testAcquisitions.begin(), f.testAcquisitions.end())));
        }
        return out;
    });
    m.def(
        "slice_fold",
        [](const LabeledDataset& ds, int foldIndex) {
            const auto folds = makeFolds();
            if (foldIndex < 0 || foldIndex >= static_cast<int>(folds.size())) throw ArgumentError("fold index out of range");
            return sliceFold(ds, folds[foldIndex]);
        },
        py::arg("dataset"), py::arg("fold_index"));

    // features
    py::class_<LdaModel>(m, "LdaModel")
        .def_property_readonly("projection", [](const LdaModel& l) { return toArray(l.projection); })
        .def_readonly("eigenvalues", &LdaModel::eigenvalues)
        .def_readonly("class_names", &LdaModel::classNames)
        .def("project", [](const LdaModel& l, const Array& x) { return projectLda(l, toVector(x)); });
    m.def(
        "fit_lda",
        [](const Array& x, const std::vector<int>& labels, std::vector<std::string> classNames, std::size_t components) {
            return fitLda(toMatrix(x), labels, std::move(classNames), components);
        },
        py::arg("x"), py::arg("labels"), py::arg("class_names"), py::arg("components"));

    py::class_<PcaModel>(m, "PcaModel")
        .def_property_readonly("components", [](const PcaModel& p) { return toArray(p.components); })
        .def_readonly("explained_variance", &PcaModel::explainedVariance)
        .def_readonly("mean", &PcaModel::mean)
        .def("project", [](const PcaModel& p, const Array& x) { return projectPca(p, toVector(x)); });
    m.def("fit_pca", [](const Array& x, std::size_t components) { return fitPca(toMatrix(x), components); },
          py::arg("x"), py::arg("components"));

    // classifiers
    py::class_<KnnModel>(m, "KnnModel")
        .def_readonly("k", &KnnModel::k)
        .def("predict", [](const KnnModel& k, const Array& x) { return knnPredict(k, toVector(x)); });
    m.def(
        "fit_knn",
        [](const Array& x, std::vector<int> labels, std::vector<std::string> classNames, int k) {
            return fitKnn(toMatrix(x), std::move(labels), std::move(classNames), k);
        },
        py::arg("x"), py::arg("labels"), py::arg("class_names"), py::arg("k") = 5);

    py::class_<SvmBinaryModel>(m, "SvmBinaryModel")
        .def_readonly("dual_coefs", &SvmBinaryModel::dualCoefs)
        .def_readonly("bias", &SvmBinaryModel::bias)
        .def_readonly("support_vectors", &SvmBinaryModel::supportVectors)
        .def("decision", [](const SvmBinaryModel& s, const Array& x) { return svmDecision(s, toVector(x)); });
    m.def(
        "fit_svm_binary",
        [](const Array& x, const std::vector<int>& labels, const std::string& kernel, double gamma, double c) {
            Kernel k;
            if (kernel == "linear") k = Kernel::linear();
            else if (kernel == "rbf") k = Kernel::rbf(gamma);
            else throw ArgumentError("kernel must be 'linear' or 'rbf'");
            SvmOptions options;
            options.c = c;
            return fitSvmBinary(toMatrix(x), labels, k, options);
        },
        py::arg("x"), py::arg("labels"), py::arg("kernel") = "linear", py::arg("gamma") = 1.0, py::arg("c") = 1.0);

    m.def("majority_vote_image", [](const std::vector<std::string>& p) { return majorityVoteImage(p); });

    // metrics
    auto confusion = [](const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& counts) {
        if (counts.ndim() != 2 || counts.shape(0) != counts.shape(1)) throw ShapeError("expected a square 2-D array");
        std::vector<std::string> names;
        for (py::ssize_t i = 0; i < counts.shape(0); ++i) names.push_back(std::to_string(i));
        return ConfusionMatrix(names, {counts.data(), counts.data() + counts.size()});
    };
    m.def("balanced_accuracy", [=](const py::array& counts) { return balancedAccuracy(confusion(counts)); });
    m.def("class_recall", [=](const py::array& counts, std::size_t c) { return classRecall(confusion(counts), c); });
    m.def("class_specificity",
          [=](const py::array& counts, std::size_t c) { return classSpecificity(confusion(counts), c); });

    // pipeline
    py::class_<FittedPipeline>(m, "FittedPipeline")
        .def_readonly("class_names", &FittedPipeline::classNames)
        .def_readonly("band_count", &FittedPipeline::bandCount)
        .def("predict", [](const FittedPipeline& p, const Array& bands) { return p.predict(toVector(bands)); })
        .def("to_json", [](const FittedPipeline& p) { return serializeBundle(p); })
        .def("save", [](const FittedPipeline& p, const std::string& path) { saveBundle(p, path); })
        .def("model_info", [](const FittedPipeline& p) { return toPython(modelInfoJson(p)); })
        .def("classify_csv", [](const FittedPipeline& p, const std::string& csv) {
            std::vector<SampleRow> rows;
            const auto result = classifySampleCsv(p, csv, &rows);
            return toPython(classifyResponseJson(p, result, rows));
        });
    m.def(
        "fit_pipeline",
        [](const LabeledDataset& ds, const py::object& config) {
            const auto cfg = configFromPython(config);
            return fitPipeline(cfg.classTransform ? transformClasses(ds, cfg.alpha) : ds, cfg);
        },
        py::arg("dataset"), py::arg("config") = py::none());
    m.def("load_bundle", [](const std::string& path) { return loadBundle(path); }, py::arg("path"));
    m.def(
        "run_cv",
        [](const LabeledDataset& ds, const py::object& config, bool sampleStd) {
            CvOptions options;
            options.sampleStdDev = sampleStd;
            const auto cfg = configFromPython(config);
            CvResult result;
            {
                py::gil_scoped_release release;
                result = runCv(ds, cfg, options);
            }
            return toPython(toJson(result));
        },
        py::arg("dataset"), py::arg("config") = py::none(), py::arg("sample_std") = false);

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
