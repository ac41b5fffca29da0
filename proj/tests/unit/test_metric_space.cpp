#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "fission/metric_space.hpp"
#include "fission/parallel.hpp"
#include "oracles.hpp"

using namespace fission;

namespace {

Dataset line(std::vector<double> xs) { return Dataset(std::move(xs), 1); }

std::vector<double> pt(std::initializer_list<double> v) { return v; }

} // namespace

TEST(Distance, IdentityIsZero) {
    const auto a = pt({0, 0});
    EXPECT_EQ(distance(a, a, Metric::euclidean()), 0.0);
}

TEST(Distance, EuclideanThreeFourFive) {
    EXPECT_EQ(distance(pt({0, 0}), pt({3, 4}), Metric::euclidean()), 5.0);
}

TEST(Distance, ManhattanMatchesCoordinateLoop) {
    const auto a = pt({1, 1}), b = pt({4, 5});
    EXPECT_EQ(distance(a, b, Metric::manhattan()), 7.0);
    EXPECT_EQ(distance(a, b, Metric::manhattan()), oracle::manhattan(a, b));
}

TEST(Distance, MinkowskiReducesToNamedMetrics) {
    const auto a = pt({0.5, -2, 3}), b = pt({1.25, 4, -1});
    EXPECT_NEAR(distance(a, b, Metric::minkowski(1.0)), distance(a, b, Metric::manhattan()), 1e-12);
    EXPECT_NEAR(distance(a, b, Metric::minkowski(2.0)), distance(a, b, Metric::euclidean()), 1e-12);
}

TEST(Distance, RejectsDimensionMismatch) {
    EXPECT_THROW(distance(pt({0, 0}), pt({1, 2, 3}), Metric::euclidean()), ValidationError);
}

TEST(Distance, RejectsNonFiniteInput) {
    EXPECT_THROW(distance(pt({0, std::nan("")}), pt({1, 2}), Metric::euclidean()), ValidationError);
    EXPECT_THROW(distance(pt({0, INFINITY}), pt({1, 2}), Metric::manhattan()), ValidationError);
}

TEST(Distance, RejectsOverflow) {
    EXPECT_THROW(distance(pt({-1e308}), pt({1e308}), Metric::euclidean()), ValidationError);
}

TEST(Metric, ParseAndTag) {
    EXPECT_EQ(Metric::parse("euclidean").tag(), "euclidean");
    EXPECT_EQ(Metric::parse("manhattan").tag(), "manhattan");
    const Metric m = Metric::parse("minkowski:3");
    EXPECT_EQ(m.kind, Metric::Kind::minkowski);
    EXPECT_EQ(m.p, 3.0);
    EXPECT_TRUE(m.is_true_metric());
    EXPECT_FALSE(Metric::parse("minkowski:0.5").is_true_metric());
    EXPECT_THROW(Metric::parse("cosine"), ValidationError);
    EXPECT_THROW(Metric::parse("minkowski:0"), ValidationError);
    EXPECT_THROW(Metric::parse("minkowski:abc"), ValidationError);
    EXPECT_THROW(Metric::minkowski(-1.0), ValidationError);
}

TEST(Dataset, ValidatesShape) {
    EXPECT_THROW(Dataset({}, 2), ValidationError);
    EXPECT_THROW(Dataset({1, 2, 3}, 2), ValidationError);
    EXPECT_THROW(Dataset({1, 2}, 0), ValidationError);
    EXPECT_THROW(Dataset({1, std::nan("")}, 1), ValidationError);
    EXPECT_THROW(Dataset({1, 2}, 1, std::vector<int>{0}), ValidationError);
    EXPECT_THROW(Dataset({1, 2}, 1, std::vector<int>{0, 2}), ValidationError);
    const Dataset ok({1, 2, 3, 4}, 2, std::vector<int>{1, 0});
    EXPECT_EQ(ok.size(), 2u);
    EXPECT_EQ(ok.class_count(), 2u);
}

TEST(DistanceMatrix, SinglePointIsZero) {
    const DistanceMatrix dm = distance_matrix(line({7.0}), Metric::euclidean());
    ASSERT_EQ(dm.size(), 1u);
    EXPECT_EQ(dm(0, 0), 0.0);
}

TEST(DistanceMatrix, LineRowForOrigin) {
    const DistanceMatrix dm = distance_matrix(line({0, 1, 10, 11}), Metric::euclidean());
    const std::vector<double> row(dm.row(0).begin(), dm.row(0).end());
    EXPECT_EQ(row, (std::vector<double>{0, 1, 10, 11}));
}

TEST(DistanceMatrix, RefusesOversizedInput) {
    EXPECT_THROW(distance_matrix(line({0, 1, 2, 3}), Metric::euclidean(), 15), ValidationError);
    EXPECT_NO_THROW(distance_matrix(line({0, 1, 2, 3}), Metric::euclidean(), 16));
}

TEST(DistanceMatrix, FromValuesValidates) {
    EXPECT_THROW(DistanceMatrix::from_values(2, {0, 1, 2, 0}), ValidationError);
    EXPECT_THROW(DistanceMatrix::from_values(2, {1, 1, 1, 0}), ValidationError);
    EXPECT_THROW(DistanceMatrix::from_values(2, {0, -1, -1, 0}), ValidationError);
    EXPECT_THROW(DistanceMatrix::from_values(2, {0, 1, 1}), ValidationError);
    EXPECT_NO_THROW(DistanceMatrix::from_values(2, {0, 1, 1, 0}));
}

TEST(DistanceMatrixProperty, AxiomsOnRandomData) {
    Rng rng(11);
    for (const Metric& m : {Metric::euclidean(), Metric::manhattan(), Metric::minkowski(1.5), Metric::minkowski(4)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Dataset ds = oracle::random_dataset(rng, 2 + rng.below(40), 1 + rng.below(5));
            const DistanceMatrix dm = distance_matrix(ds, m);
            for (Index i = 0; i < dm.size(); ++i) {
                EXPECT_EQ(dm(i, i), 0.0);
                for (Index j = 0; j < dm.size(); ++j) {
                    EXPECT_EQ(dm(i, j), dm(j, i));
                    EXPECT_GE(dm(i, j), 0.0);
                }
            }
            const TriangleReport rep = validate_triangle(dm, 2000, trial);
            EXPECT_TRUE(rep.pass) << m.tag() << " worst " << rep.worst_violation;
        }
    }
}

TEST(DistanceMatrixProperty, ManhattanEntriesMatchOracle) {
    Rng rng(5);
    const Dataset ds = oracle::random_dataset(rng, 30, 4);
    const DistanceMatrix dm = distance_matrix(ds, Metric::manhattan());
    for (Index i = 0; i < ds.size(); ++i)
        for (Index j = 0; j < ds.size(); ++j) {
            const std::vector<double> a(ds.point(i).begin(), ds.point(i).end());
            const std::vector<double> b(ds.point(j).begin(), ds.point(j).end());
            EXPECT_NEAR(dm(i, j), oracle::manhattan(a, b), 1e-12);
        }
}

TEST(DistanceMatrixProperty, PermutationEquivariant) {
    Rng rng(21);
    const std::size_t n = 25, d = 3;
    const Dataset ds = oracle::random_dataset(rng, n, d);
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<double> coords;
    for (Index i : perm) coords.insert(coords.end(), ds.point(i).begin(), ds.point(i).end());
    const Dataset shuffled(std::move(coords), d);
    const DistanceMatrix a = distance_matrix(ds, Metric::euclidean());
    const DistanceMatrix b = distance_matrix(shuffled, Metric::euclidean());
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) EXPECT_EQ(b(i, j), a(perm[i], perm[j]));
}

TEST(DistanceMatrixProperty, ThreadCountDoesNotChangeBits) {
    Rng rng(3);
    const Dataset ds = oracle::random_dataset(rng, 300, 3);
    std::vector<double> one, many;
    {
        parallel::ScopedThreadCount t(1);
        one = distance_matrix(ds, Metric::euclidean()).values();
    }
    {
        parallel::ScopedThreadCount t(4);
        many = distance_matrix(ds, Metric::euclidean()).values();
    }
    EXPECT_EQ(one, many);
}

TEST(Triangle, DetectsConstructedViolation) {
    const DistanceMatrix dm = DistanceMatrix::from_values(3, {0, 1, 100, 1, 0, 1, 100, 1, 0});
    const TriangleReport rep = validate_triangle(dm, 1000);
    EXPECT_FALSE(rep.pass);
    EXPECT_DOUBLE_EQ(rep.worst_violation, 98.0);
    EXPECT_TRUE(rep.exhaustive);
}

TEST(Triangle, TwoPointsPassVacuously) {
    const DistanceMatrix dm = DistanceMatrix::from_values(2, {0, 3, 3, 0});
    const TriangleReport rep = validate_triangle(dm, 100);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.triples_checked, 0u);
}

TEST(Triangle, FlagsFractionalMinkowski) {
    Rng rng(8);
    const Dataset ds = oracle::random_dataset(rng, 20, 2);
    const TriangleReport rep = validate_triangle(distance_matrix(ds, Metric::minkowski(0.5)), 5000);
    EXPECT_TRUE(rep.metric_guarantee_lapsed);
    EXPECT_FALSE(validate_triangle(distance_matrix(ds, Metric::euclidean()), 5000).metric_guarantee_lapsed);
}

TEST(Triangle, SampledModeIsSeeded) {
    Rng rng(9);
    const DistanceMatrix dm = distance_matrix(oracle::random_dataset(rng, 200, 2), Metric::euclidean());
    const TriangleReport a = validate_triangle(dm, 1000, 4);
    const TriangleReport b = validate_triangle(dm, 1000, 4);
    EXPECT_FALSE(a.exhaustive);
    EXPECT_EQ(a.triples_checked, 1000u);
    EXPECT_EQ(a.worst_violation, b.worst_violation);
    EXPECT_EQ(a.worst_triple, b.worst_triple);
}
