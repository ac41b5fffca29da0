#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fission/datagen.hpp"
#include "fission/density.hpp"
#include "fission/error.hpp"
#include "fission/fission_core.hpp"
#include "fission/metric_space.hpp"

namespace fission {

/// Median wall-clock milliseconds of each stage at one dataset size.
struct BenchRow {
    std::size_t n = 0;
    std::size_t n0 = 0;
    double distance_matrix_ms = 0.0;
    double knn_density_ms = 0.0;         ///< dataset route (k-d tree)
    double knn_density_matrix_ms = 0.0;  ///< dense-matrix route
    double fc_ms = 0.0;                  ///< distance matrix + fission
    double fc_knn_ms = 0.0;              ///< distance matrix + FC-KNN
    int fc_k = 0;
    int fc_knn_k = 0; ///< -1 when FC-KNN over-denoised
};

template <class F>
double median_ms(std::size_t repeats, F&& f) {
    std::vector<double> samples;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
        const auto start = std::chrono::steady_clock::now();
        f();
        samples.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t mid = samples.size() / 2;
    return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

/// Gaussian blobs of about 100 points each, 20 spreads apart. The size is
/// rounded down to a multiple of the blob count.
inline Dataset bench_dataset(std::size_t n, std::uint64_t seed) {
    GenSpec spec = GenSpec::defaults(GenKind::blobs, seed);
    auto& p = std::get<BlobsParams>(spec.params);
    p.k = std::max<std::size_t>(1, n / 100);
    p.count = n / p.k;
    return generate(spec);
}

inline std::vector<BenchRow> run_bench(std::span<const std::size_t> sizes, std::size_t repeats, std::size_t n0,
                                       std::uint64_t seed = 1) {
    std::vector<BenchRow> rows;
    for (std::size_t n : sizes) {
        if (n < 10) throw ValidationError("benchmark sizes must be >= 10");
        const Dataset ds = bench_dataset(n, seed);
        const Metric metric = Metric::euclidean();
        BenchRow row;
        row.n = ds.size();
        row.n0 = std::min(n0, ds.size() - 1);
        row.distance_matrix_ms = median_ms(repeats, [&] { (void)distance_matrix(ds, metric); });
        const DistanceMatrix dm = distance_matrix(ds, metric);
        row.knn_density_ms = median_ms(repeats, [&] { (void)knn_density(ds, metric, row.n0); });
        row.knn_density_matrix_ms = median_ms(repeats, [&] { (void)knn_density(dm, row.n0); });
        row.fc_ms = median_ms(repeats, [&] { row.fc_k = fission_cluster(distance_matrix(ds, metric)).k; });
        FcParams params;
        params.n0 = N0Rule::count(row.n0);
        row.fc_knn_ms = median_ms(repeats, [&] {
            try {
                row.fc_knn_k = fc_knn(distance_matrix(ds, metric), params).partition.k;
            } catch (const AlgorithmError&) {
                row.fc_knn_k = -1; // over-denoised; small single-blob sizes
            }
        });
        rows.push_back(row);
    }
    return rows;
}

inline std::string format_bench_csv(std::span<const BenchRow> rows) {
    std::string out = "n,n0,distance_matrix_ms,knn_density_ms,knn_density_matrix_ms,fc_ms,fc_knn_ms,fc_k,fc_knn_k\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%d,%d\n", r.n, r.n0, r.distance_matrix_ms,
                      r.knn_density_ms, r.knn_density_matrix_ms, r.fc_ms, r.fc_knn_ms, r.fc_k, r.fc_knn_k);
        out += buf;
    }
    return out;
}

} // namespace fission
