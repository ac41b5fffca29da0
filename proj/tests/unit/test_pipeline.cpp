#include <gtest/gtest.h>

#include <vector>

#include "fission/bench.hpp"
#include "fission/datagen.hpp"
#include "fission/report.hpp"
#include "fission/sweep.hpp"

using namespace fission;

TEST(TGrid, InclusiveAndValidated) {
    EXPECT_EQ(t_grid(2, 5, 1), (std::vector<double>{2, 3, 4, 5}));
    EXPECT_EQ(t_grid(2, 2.25, 0.25).size(), 2u);
    EXPECT_THROW(t_grid(5, 2, 1), ValidationError);
    EXPECT_THROW(t_grid(2, 5, 0), ValidationError);
}

TEST(Sweep, UniformBlobStaysWhole) {
    // A uniform-density blob never separates. Gaussian blobs can separate at
    // small t once only their sparse-edged core remains.
    std::vector<double> coords;
    for (int y = 0; y < 15; ++y)
        for (int x = 0; x < 15; ++x)
            if ((x - 7) * (x - 7) + (y - 7) * (y - 7) <= 49) {
                coords.push_back(x);
                coords.push_back(y);
            }
    const Dataset ds(std::move(coords), 2);
    const DistanceMatrix dm = distance_matrix(ds, Metric::euclidean());
    const std::vector<double> ts = t_grid(2, 13, 1);
    const std::vector<std::size_t> n0s{4};
    const SweepReport r = sweep(dm, std::nullopt, ts, n0s, FcParams{});
    ASSERT_EQ(r.points.size(), ts.size());
    for (const auto& pt : r.points) EXPECT_EQ(pt.k, 1) << "t=" << pt.t;
    ASSERT_EQ(r.intervals.size(), 1u);
    EXPECT_EQ(r.intervals[0].length, ts.size());
}

TEST(Sweep, IntervalsPartitionEachN0Row) {
    const Dataset ds = generate(GenSpec::defaults(GenKind::imbalance, 3));
    const DistanceMatrix dm = distance_matrix(ds, Metric::euclidean());
    const std::vector<double> ts = t_grid(2, 8, 1);
    const std::vector<std::size_t> n0s{3, 5};
    const SweepReport r = sweep(dm, std::span<const int>(*ds.labels()), ts, n0s, FcParams{});
    EXPECT_EQ(r.points.size(), ts.size() * n0s.size());
    for (std::size_t n0 : n0s) {
        std::size_t covered = 0;
        for (const auto& iv : r.intervals)
            if (iv.n0 == n0) covered += iv.length;
        EXPECT_EQ(covered, ts.size());
    }
    for (const auto& pt : r.points) EXPECT_TRUE(pt.accuracy.has_value());
}

TEST(Sweep, EmptyInputsRejected) {
    const DistanceMatrix dm = distance_matrix(generate(GenSpec::defaults(GenKind::imbalance, 3)), Metric::euclidean());
    const std::vector<double> ts{};
    const std::vector<std::size_t> n0s{3};
    EXPECT_THROW(sweep(dm, std::nullopt, ts, n0s, FcParams{}), ValidationError);
}

TEST(Bench, SingleSizeGivesOneRow) {
    const std::vector<std::size_t> sizes{10};
    const auto rows = run_bench(sizes, 1, 3);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n, 10u);
    EXPECT_EQ(rows[0].fc_knn_k, -1);
    const std::string csv = format_bench_csv(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    const std::vector<std::size_t> tiny{5};
    EXPECT_THROW(run_bench(tiny, 1, 3), ValidationError);
}

TEST(Report, PartitionJsonHasStableKeys) {
    const DistanceMatrix dm = distance_matrix(generate(GenSpec::defaults(GenKind::grid_line)), Metric::euclidean());
    const Json j = to_json(fission_cluster(dm));
    EXPECT_EQ(j.dump(),
              R"({"k":2,"stop_threshold":1.0,"split_trace":[{"subset_size":4,"mc":9.0,"d0_reference":1.0,)"
              R"("crack_row":0,"crack_threshold":1.0,"first_size":2,"second_size":2}]})");
}
