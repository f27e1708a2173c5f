#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <sys/wait.h>

#include "fixtures.hpp"
#include "honeyhsi/cli.hpp"
#include "honeyhsi/error.hpp"

using namespace honeyhsi;
using honeyhsi::fixture::TempDir;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome runCli(std::vector<std::string> args) {
    args.insert(args.begin(), "honeyhsi");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

int runBinary(const std::string& args, const std::filesystem::path& stdoutPath) {
    const std::string cmd = std::string("\"") + HONEYHSI_CLI_PATH + "\" " + args + " > \"" + stdoutPath.string() +
                            "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<double>> spectraOf(const LabeledDataset& ds, const std::string& imageId) {
    std::vector<std::vector<double>> out;
    for (const auto& inst : ds.instances())
        if (inst.imageId == imageId) out.push_back(inst.bands);
    return out;
}

// OriginA gets a second brand offset by a constant; OriginB keeps a single brand.
LabeledDataset brandedDataset() {
    auto instances = fixture::smallReferenceLayout(2).instances();
    std::vector<SpectralInstance> extra;
    for (const auto& inst : instances) {
        if (inst.origin != "OriginA") continue;
        SpectralInstance copy = inst;
        copy.brand = "B7";
        copy.imageId += "-b7";
        for (auto& v : copy.bands) v += 3.0;
        extra.push_back(copy);
    }
    instances.insert(instances.end(), extra.begin(), extra.end());
    return LabeledDataset(instances);
}

}  // namespace

TEST(CliPrepare, SplitsSignificantBrandsAndWritesClassColumn) {
    TempDir dir;
    fixture::writeText(dir / "in.csv", fixture::toCsv(brandedDataset()));
    std::ostringstream log;
    const auto summary = cli::cmdPrepare(dir / "in.csv", dir / "out.csv", 0.05, log);
    EXPECT_EQ(summary.classesBefore, 2u);
    EXPECT_EQ(summary.classesAfter, 3u);
    EXPECT_NE(log.str().find("2 origins -> 3 classes"), std::string::npos) << log.str();

    const auto back = loadCsv(dir / "out.csv");
    EXPECT_EQ(back.classNames(), (std::vector<std::string>{"B1_OriginA", "B7_OriginA", "OriginB"}));
}

TEST(CliPrepare, SingleBrandDatasetUnchanged) {
    TempDir dir;
    const auto ds = fixture::smallReferenceLayout(3);
    fixture::writeText(dir / "in.csv", fixture::toCsv(ds));
    std::ostringstream log;
    const auto summary = cli::cmdPrepare(dir / "in.csv", dir / "out.csv", 0.05, log);
    EXPECT_EQ(summary.classesBefore, summary.classesAfter);
    EXPECT_EQ(loadCsv(dir / "out.csv").instances(), ds.instances());
}

TEST(CliPrepare, NearOneAlphaKeepsDistinctBrandsApart) {
    TempDir dir;
    fixture::writeText(dir / "in.csv", fixture::toCsv(brandedDataset()));
    std::ostringstream log;
    EXPECT_EQ(cli::cmdPrepare(dir / "in.csv", dir / "out.csv", 1.0 - 1e-9, log).classesAfter, 3u);
}

TEST(CliPrepare, ParseErrorsExitWithParseCode) {
    TempDir dir;
    fixture::writeText(dir / "bad.csv", "origin,brand,acquisition,image_id,b001\nA,B,1,i,0.1\n");
    const auto r = runCli({"prepare", "--input", (dir / "bad.csv").string(), "--output", (dir / "o.csv").string()});
    EXPECT_EQ(r.code, cli::kParseError);
    EXPECT_NE(r.err.find("band columns"), std::string::npos) << r.err;
}

TEST(CliEvaluate, PrintedMeanEqualsReportMean) {
    TempDir dir;
    fixture::writeText(dir / "in.csv", fixture::toCsv(fixture::smallReferenceLayout(3)));
    const auto r = runCli({"evaluate", "--input", (dir / "in.csv").string(), "--extractor", "lda", "--components",
                           "2", "--classifier", "svm-linear", "--report", (dir / "report.json").string(),
                           "--threads", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json report = json::parse(fixture::readText(dir / "report.json"));
    for (const auto& scenario : report["scenarios"]) {
        const std::string expected = scenario["scenario"].get<std::string>() + ": mean = " + scenario["mean"].dump() +
                                     " ± " + scenario["std"].dump();
        EXPECT_NE(r.out.find(expected), std::string::npos) << r.out;
        EXPECT_GT(scenario["mean"].get<double>(), 0.99);
    }
    EXPECT_TRUE(std::filesystem::exists(dir / "report.csv"));
    EXPECT_EQ(report["config"]["components"], 2);
}

TEST(CliEvaluate, ConfigFileWithFlagOverride) {
    TempDir dir;
    fixture::writeText(dir / "in.csv", fixture::toCsv(fixture::smallReferenceLayout(3)));
    fixture::writeText(dir / "cfg.json", R"({"extractor": "pca", "components": 3, "classifier": "knn", "k": 3})");
    const auto r = runCli({"evaluate", "--input", (dir / "in.csv").string(), "--config", (dir / "cfg.json").string(),
                           "--k", "1", "--report", (dir / "r.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json report = json::parse(fixture::readText(dir / "r.json"));
    EXPECT_EQ(report["config"]["extractor"], "pca");
    EXPECT_EQ(report["config"]["components"], 3);
    EXPECT_EQ(report["config"]["k"], 1);
}

TEST(CliEvaluate, ArgumentErrors) {
    EXPECT_EQ(runCli({"evaluate"}).code, cli::kArgumentError);
    EXPECT_EQ(runCli({"evaluate", "--input", "x.csv", "--classifier", "tree"}).code, cli::kArgumentError);
    EXPECT_EQ(runCli({"evaluate", "--input", "x.csv", "--components", "0"}).code, cli::kArgumentError);
    EXPECT_EQ(runCli({"no-such-command"}).code, cli::kArgumentError);
    EXPECT_EQ(runCli({"evaluate", "--input", "/nonexistent/x.csv"}).code, cli::kParseError);
}

TEST(CliSweep, RowsPerComponentAndClassifier) {
    TempDir dir;
    fixture::writeText(dir / "in.csv", fixture::toCsv(fixture::smallReferenceLayout(4)));
    const auto r = runCli({"sweep", "--input", (dir / "in.csv").string(), "--m-min", "1", "--m-max", "3",
                           "--classifiers", "knn,svm-linear", "--out", (dir / "sweep.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(fixture::readText(dir / "sweep.csv"));
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "m,classifier,mean_ba,std_ba,image_mean_ba,image_std_ba");
    std::vector<std::string> body;
    while (std::getline(lines, line)) body.push_back(line);
    ASSERT_EQ(body.size(), 6u);
    EXPECT_EQ(body[0].rfind("1,knn,", 0), 0u);
    EXPECT_EQ(body[5].rfind("3,svm-linear,", 0), 0u);

    const auto single = runCli({"sweep", "--input", (dir / "in.csv").string(), "--m-min", "2", "--m-max", "2",
                                "--classifiers", "knn"});
    ASSERT_EQ(single.code, 0) << single.err;
    std::istringstream out(single.out);
    int count = 0;
    while (std::getline(out, line)) ++count;
    EXPECT_EQ(count, 2);  // header + one row

    // LDA on 4 classes allows at most 3 components.
    EXPECT_EQ(runCli({"sweep", "--input", (dir / "in.csv").string(), "--m-max", "4"}).code, cli::kArgumentError);
}

TEST(CliTrainClassify, MemorizingBundleReclassifiesTraining) {
    TempDir dir;
    const auto ds = fixture::smallReferenceLayout(2, 5);
    fixture::writeText(dir / "in.csv", fixture::toCsv(ds));
    const auto t = runCli({"train", "--input", (dir / "in.csv").string(), "--extractor", "none", "--classifier", "knn",
                           "--k", "1", "--out", (dir / "model.json").string()});
    ASSERT_EQ(t.code, 0) << t.err;

    const auto pipeline = loadBundle(dir / "model.json");
    for (const auto& inst : ds.instances()) EXPECT_EQ(pipeline.predict(inst.bands), inst.classLabel);

    // Byte-identical re-serialization.
    const std::string bytes = fixture::readText(dir / "model.json");
    EXPECT_EQ(serializeBundle(pipeline), bytes);
    EXPECT_EQ(serializeBundle(bundleFromJson(json::parse(bytes))), bytes);

    const std::string image = ds.instances().front().imageId;
    fixture::writeText(dir / "sample.csv", fixture::sampleCsv(spectraOf(ds, image), image));
    const auto c = runCli({"classify", "--model", (dir / "model.json").string(), "--sample",
                           (dir / "sample.csv").string()});
    ASSERT_EQ(c.code, 0) << c.err;
    const json response = json::parse(c.out);
    EXPECT_EQ(response["imageClass"], ds.instances().front().classLabel);
    ASSERT_EQ(response["perInstance"].size(), 5u);
    EXPECT_EQ(response["spectrumEcho"].size(), 5u);
    EXPECT_EQ(response["modelInfo"]["classifier"], "knn");
}

TEST(CliTrainClassify, ThirteenToTwelveVote) {
    TempDir dir;
    const auto ds = fixture::smallReferenceLayout(2, 5);
    fixture::writeText(dir / "in.csv", fixture::toCsv(ds));
    std::ostringstream log;
    PipelineConfig config;
    config.extractor = ExtractorKind::None;
    config.classifier = ClassifierKind::Knn;
    config.k = 1;
    cli::cmdTrain(dir / "in.csv", config, dir / "model.json", log);

    std::vector<std::vector<double>> rows;
    std::size_t a = 0, b = 0;
    for (const auto& inst : ds.instances()) {
        if (inst.classLabel == "OriginA" && a < 13) {
            rows.push_back(inst.bands);
            ++a;
        } else if (inst.classLabel == "OriginB" && b < 12) {
            rows.push_back(inst.bands);
            ++b;
        }
    }
    ASSERT_EQ(rows.size(), 25u);
    fixture::writeText(dir / "sample.csv", fixture::sampleCsv(rows, "img-x"));
    std::ostringstream out;
    const json response = cli::cmdClassify(dir / "model.json", dir / "sample.csv", out);
    EXPECT_EQ(response["imageClass"], "OriginA");
    int votesA = 0;
    for (const auto& p : response["perInstance"]) votesA += p == "OriginA";
    EXPECT_EQ(votesA, 13);
}

TEST(CliTrainClassify, ClassifyMatchesInProcessPredict) {
    TempDir dir;
    const auto ds = fixture::smallReferenceLayout(3, 5);
    fixture::writeText(dir / "in.csv", fixture::toCsv(ds));
    std::ostringstream log;
    PipelineConfig config;
    config.components = 2;
    const auto pipeline = cli::cmdTrain(dir / "in.csv", config, dir / "model.json", log);

    std::mt19937_64 rng(81);
    std::normal_distribution<double> g(0.5, 3.0);
    std::vector<std::vector<double>> rows(12, std::vector<double>(kReferenceBandCount));
    for (auto& r : rows)
        for (auto& v : r) v = g(rng);
    fixture::writeText(dir / "sample.csv", fixture::sampleCsv(rows));
    std::ostringstream out;
    const json response = cli::cmdClassify(dir / "model.json", dir / "sample.csv", out);
    EXPECT_FALSE(response.contains("imageClass"));
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(response["perInstance"][i], pipeline.predict(rows[i]));
}

TEST(CliTrainClassify, SampleErrors) {
    TempDir dir;
    fixture::writeText(dir / "in.csv", fixture::toCsv(fixture::smallReferenceLayout(2)));
    ASSERT_EQ(runCli({"train", "--input", (dir / "in.csv").string(), "--classifier", "knn", "--components", "1",
                      "--out", (dir / "m.json").string()})
                  .code,
              0);
    fixture::writeText(dir / "empty.csv", "");
    EXPECT_EQ(runCli({"classify", "--model", (dir / "m.json").string(), "--sample", (dir / "empty.csv").string()}).code,
              cli::kArgumentError);
    fixture::writeText(dir / "short.csv", "b001,b002\n0.1,0.2\n");
    EXPECT_EQ(runCli({"classify", "--model", (dir / "m.json").string(), "--sample", (dir / "short.csv").string()}).code,
              cli::kParseError);
    EXPECT_EQ(runCli({"classify", "--model", (dir / "missing.json").string(), "--sample", (dir / "short.csv").string()})
                  .code,
              cli::kParseError);
}

TEST(CliBinary, ExitCodesFromRealProcess) {
    TempDir dir;
    EXPECT_EQ(runBinary("--help", dir / "o.txt"), 0);
    EXPECT_NE(fixture::readText(dir / "o.txt").find("evaluate"), std::string::npos);
    EXPECT_EQ(runBinary("evaluate", dir / "o.txt"), 2);
    EXPECT_EQ(runBinary("evaluate --input /nonexistent.csv", dir / "o.txt"), 3);

    fixture::writeText(dir / "in.csv", fixture::toCsv(fixture::smallReferenceLayout(2)));
    const std::string in = (dir / "in.csv").string();
    const std::string model = (dir / "m.json").string();
    EXPECT_EQ(runBinary("train --input " + in + " --extractor none --classifier knn --k 1 --out " + model, dir / "o.txt"),
              0);
    fixture::writeText(dir / "empty.csv", "");
    EXPECT_EQ(runBinary("classify --model " + model + " --sample " + (dir / "empty.csv").string(), dir / "o.txt"), 2);
}

TEST(CliExitCodes, Mapping) {
    EXPECT_EQ(cli::exitCodeFor(ArgumentError("x")), cli::kArgumentError);
    EXPECT_EQ(cli::exitCodeFor(ParseError("x")), cli::kParseError);
    EXPECT_EQ(cli::exitCodeFor(LookupError("x")), cli::kParseError);
    EXPECT_EQ(cli::exitCodeFor(ConvergenceError("x")), cli::kNumericalError);
    EXPECT_EQ(cli::exitCodeFor(NotPositiveDefiniteError("x")), cli::kNumericalError);
}
