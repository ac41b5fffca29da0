#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "fission/datagen.hpp"
#include "fission/io.hpp"
#include "fission/plot.hpp"
#include "fission/random.hpp"

using namespace fission;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fission_unit_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST(RngTest, MatchesReferenceSequence) {
    // Reference values from an independent splitmix64 + xoshiro256** implementation.
    Rng a(0);
    EXPECT_EQ(a.next(), 0x99ec5f36cb75f2b4ULL);
    EXPECT_EQ(a.next(), 0xbf6e1f784956452aULL);
    EXPECT_EQ(a.next(), 0x1a5f849d4933e6e0ULL);
    Rng b(42);
    EXPECT_EQ(b.next(), 0x15780b2e0c2ec716ULL);
    Rng c(0);
    EXPECT_DOUBLE_EQ(c.uniform(), 0.6012629994179048);
}

TEST(RngTest, NormalMoments) {
    Rng rng(1);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sq += v * v;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RngTest, BelowStaysInRange) {
    Rng rng(2);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 7u);
}

TEST(Generate, BlobsShape) {
    const Dataset ds = generate(GenSpec::defaults(GenKind::blobs, 1));
    EXPECT_EQ(ds.size(), 500u);
    EXPECT_EQ(ds.dims(), 2u);
    EXPECT_EQ(ds.class_count(), 5u);
}

TEST(Generate, ImbalanceShape) {
    const Dataset ds = generate(GenSpec::defaults(GenKind::imbalance, 1));
    EXPECT_EQ(ds.size(), 101u);
    EXPECT_EQ(ds.class_count(), 2u);
}

TEST(Generate, AnnulusBlobsShape) {
    const Dataset ds = generate(GenSpec::defaults(GenKind::annulus_blobs, 1));
    EXPECT_EQ(ds.size(), 2461u);
    EXPECT_EQ(ds.class_count(), 4u);
    for (Index i = 0; i < ds.size(); ++i) {
        if ((*ds.labels())[i] != 0) continue;
        const double r = std::hypot(ds.point(i)[0], ds.point(i)[1]);
        EXPECT_GE(r, 8.0 - 1e-12);
        EXPECT_LE(r, 10.0 + 1e-12);
    }
}

TEST(Generate, GridLineIsExact) {
    const Dataset ds = generate(GenSpec::defaults(GenKind::grid_line));
    EXPECT_EQ(ds.coordinates(), (std::vector<double>{0, 1, 10, 11}));
    EXPECT_EQ(*ds.labels(), (std::vector<int>{0, 0, 1, 1}));
}

TEST(Generate, FamiliesHasSixClasses) {
    const Dataset ds = generate(GenSpec::defaults(GenKind::families, 1));
    const FamiliesParams p;
    EXPECT_EQ(ds.size(), 2 * p.dense_count + 2 * p.medium_count + p.bridge_count + p.noise_count);
    EXPECT_EQ(ds.class_count(), 6u);
}

TEST(Generate, DeterministicPerSeedAndSeedSensitive) {
    for (GenKind k : {GenKind::blobs, GenKind::imbalance, GenKind::annulus_blobs, GenKind::families}) {
        const Dataset a = generate(GenSpec::defaults(k, 9));
        const Dataset b = generate(GenSpec::defaults(k, 9));
        const Dataset c = generate(GenSpec::defaults(k, 10));
        EXPECT_EQ(a.coordinates(), b.coordinates());
        EXPECT_NE(a.coordinates(), c.coordinates());
    }
}

TEST(Generate, RejectsInvalidParameters) {
    GenSpec spec = GenSpec::defaults(GenKind::blobs);
    std::get<BlobsParams>(spec.params).k = 0;
    EXPECT_THROW(generate(spec), ValidationError);
    spec = GenSpec::defaults(GenKind::annulus_blobs);
    std::get<AnnulusBlobsParams>(spec.params).outer_radius = 1.0;
    EXPECT_THROW(generate(spec), ValidationError);
}

TEST(GenSpecJson, RoundTripAndStrictness) {
    const auto doc = nlohmann::json::parse(R"({"kind":"blobs","seed":4,"k":3,"spread":0.5})");
    const GenSpec spec = GenSpec::from_json(doc);
    EXPECT_EQ(spec.seed, 4u);
    EXPECT_EQ(std::get<BlobsParams>(spec.params).k, 3u);
    EXPECT_EQ(std::get<BlobsParams>(spec.params).spread, 0.5);
    const GenSpec again = GenSpec::from_json(nlohmann::json::parse(spec.to_json().dump()));
    EXPECT_EQ(again.to_json(), spec.to_json());
    EXPECT_THROW(GenSpec::from_json(nlohmann::json::parse(R"({"kind":"blobs","kk":3})")), ValidationError);
    EXPECT_THROW(GenSpec::from_json(nlohmann::json::parse(R"({"kind":"spiral"})")), ValidationError);
    EXPECT_THROW(GenSpec::from_json(nlohmann::json::parse(R"({"kind":"blobs","k":"three"})")), ValidationError);
    EXPECT_THROW(GenSpec::from_json(nlohmann::json::parse(R"([1,2])")), ValidationError);
}

TEST(Csv, MinimalFile) {
    const Dataset ds = parse_csv("0,0\n3,4\n");
    EXPECT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.dims(), 2u);
    EXPECT_FALSE(ds.labels().has_value());
}

TEST(Csv, HeaderAndLabelsAreRemapped) {
    const Dataset ds = parse_csv("a,b,label\n1,2,7\n3,4,3\n5,6,7\n");
    EXPECT_EQ(ds.dims(), 2u);
    EXPECT_EQ(*ds.labels(), (std::vector<int>{1, 0, 1}));
}

TEST(Csv, ErrorsNameTheLine) {
    EXPECT_THROW(parse_csv(""), ValidationError);
    EXPECT_THROW(parse_csv("x,y\n"), ValidationError);
    try {
        parse_csv("1,2\n3\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    try {
        parse_csv("1,2\n3,abc\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("column 2"), std::string::npos);
    }
    EXPECT_THROW(parse_csv("x,label\n1,0.5\n"), ValidationError);
    EXPECT_THROW(parse_csv("1,nan\n"), ValidationError);
}

TEST(Csv, IrisFile) {
    const Dataset ds = load_csv(FISSION_TEST_DATA_DIR "/iris.csv");
    EXPECT_EQ(ds.size(), 150u);
    EXPECT_EQ(ds.dims(), 4u);
    EXPECT_EQ(ds.class_count(), 3u);
}

TEST(Csv, MissingFileIsIoError) { EXPECT_THROW(load_csv(temp_path("does_not_exist.csv")), IoError); }

TEST(CsvProperty, SaveLoadRoundTripIsExact) {
    for (GenKind k : {GenKind::blobs, GenKind::annulus_blobs}) {
        const Dataset ds = generate(GenSpec::defaults(k, 3));
        const fs::path path = temp_path("roundtrip.csv");
        save_csv(ds, path);
        const Dataset back = load_csv(path);
        EXPECT_EQ(back.coordinates(), ds.coordinates());
        EXPECT_EQ(back.labels(), ds.labels());
    }
}

TEST(Labels, FormatAndRoundTrip) {
    const std::vector<int> labels{0, 0, 1};
    EXPECT_EQ(format_labels(labels), "0\n0\n1\n");
    const fs::path path = temp_path("labels.txt");
    save_labels(labels, path);
    EXPECT_EQ(load_labels(path), labels);
    EXPECT_THROW(format_labels(std::vector<int>{}), ValidationError);
    io::write_file_atomic(path, "0\nx\n");
    EXPECT_THROW(load_labels(path), ValidationError);
}

TEST(AtomicWrite, FailureLeavesNoTargets) {
    const fs::path good = temp_path("batch_good.txt");
    fs::remove(good);
    const fs::path bad = temp_path("no_such_dir") / "out.txt";
    EXPECT_THROW(io::write_files_atomic({{good, "a"}, {bad, "b"}}), IoError);
    EXPECT_FALSE(fs::exists(good));
    EXPECT_FALSE(fs::exists(fs::path(good.string() + ".tmp")));
}

TEST(Plot, LineWithTwoClusters) {
    const Dataset ds({0, 0, 1, 0, 10, 0, 11, 0}, 2);
    const std::string svg = render_svg(ds, std::vector<int>{0, 0, 1, 1});
    EXPECT_EQ(count_of(svg, "<circle"), 4u);
    EXPECT_EQ(count_of(svg, kPalette[0]), 2u);
    EXPECT_EQ(count_of(svg, kPalette[1]), 2u);
    EXPECT_EQ(svg, render_svg(ds, std::vector<int>{0, 0, 1, 1}));
}

TEST(Plot, RequiresTwoDimensions) {
    const Dataset ds({0, 0, 0, 1, 1, 1}, 3);
    try {
        render_svg(ds, std::vector<int>{0, 0});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_STREQ(e.what(), "plot requires 2-D data");
    }
}
