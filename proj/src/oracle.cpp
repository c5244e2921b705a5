#include "sparsebeam/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sparsebeam {

namespace {

constexpr long long kCountSaturated = std::numeric_limits<long long>::max() / 4;

// Per-target closed-form value on a fixed support held in preallocated
// buffers; the enumeration hot loop calls this once per subset.
struct SupportEvaluator {
    const DesignProblem& dp;
    int p;
    Eigen::MatrixXcd q;
    Eigen::VectorXcd a, z;

    SupportEvaluator(const DesignProblem& problem, int support_size)
        : dp(problem), p(support_size), q(support_size, support_size), a(support_size), z(support_size) {}

    // Overall value; negative return flags a singular restricted Qmat.
    double value(const int* idx) {
        double total = 0.0;
        for (int l = 0; l < dp.num_targets(); ++l) {
            const HermitianMatrix& qm = dp.qmat[static_cast<size_t>(l)];
            const ComplexVector& av = dp.target_vectors[static_cast<size_t>(l)];
            for (int i = 0; i < p; ++i) {
                a(i) = av(idx[i]);
                for (int j = 0; j <= i; ++j) {
                    q(i, j) = qm(idx[i], idx[j]);
                    q(j, i) = std::conj(q(i, j));
                }
            }
            Eigen::LLT<Eigen::MatrixXcd> llt(q);
            if (llt.info() != Eigen::Success) return -1.0;
            z = llt.solve(a);
            const double d = a.dot(z).real();  // a^H Q^-1 a, real positive for PD Q
            if (!(d > 0.0)) return -1.0;
            total += 1.0 / d;
        }
        return total;
    }
};

std::uint64_t mask_bits_of(const int* idx, int p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < p; ++i) bits |= std::uint64_t{1} << idx[i];
    return bits;
}

// Subset-lexicographic comparison on bitmasks: the mask containing the
// smallest differing index comes first.
bool bits_lex_before(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t diff = a ^ b;
    if (diff == 0) return false;
    return (a >> std::countr_zero(diff)) & 1;
}

struct Extreme {
    double value = 0.0;
    std::uint64_t bits = 0;
    bool set = false;

    void take_min(double v, std::uint64_t b) {
        if (!set || v < value || (v == value && bits_lex_before(b, bits))) {
            value = v;
            bits = b;
            set = true;
        }
    }
    void take_max(double v, std::uint64_t b) {
        if (!set || v > value || (v == value && bits_lex_before(b, bits))) {
            value = v;
            bits = b;
            set = true;
        }
    }
};

// Lexicographic rank -> combination (combinatorial number system).
void unrank_combination(long long rank, int n, int p, int* out) {
    int start = 0;
    for (int k = 0; k < p; ++k) {
        for (int x = start;; ++x) {
            const long long below = combination_count(n - x - 1, p - k - 1);
            if (rank < below) {
                out[k] = x;
                start = x + 1;
                break;
            }
            rank -= below;
        }
    }
}

bool next_combination(int* idx, int n, int p) {
    int k = p - 1;
    while (k >= 0 && idx[k] == n - p + k) --k;
    if (k < 0) return false;
    ++idx[k];
    for (int i = k + 1; i < p; ++i) idx[i] = idx[i - 1] + 1;
    return true;
}

SelectionMask mask_from_bits(std::uint64_t bits, int n) {
    std::vector<bool> active(static_cast<size_t>(n), false);
    for (int k = 0; k < n; ++k)
        if ((bits >> k) & 1) active[static_cast<size_t>(k)] = true;
    return SelectionMask(std::move(active));
}

std::uint64_t draw_below(std::mt19937_64& gen, std::uint64_t bound) {
    // modulo with rejection: unbiased and identical on every platform
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / bound * bound;
    std::uint64_t r;
    do {
        r = gen();
    } while (r >= limit);
    return r % bound;
}

}  // namespace

long long combination_count(int n, int p) {
    if (p < 0 || n < 0 || p > n) return 0;
    p = std::min(p, n - p);
    long long c = 1;
    for (int k = 1; k <= p; ++k) {
        if (c > kCountSaturated / (n - p + k)) return kCountSaturated;
        c = c * (n - p + k) / k;
        if (c >= kCountSaturated) return kCountSaturated;
    }
    return c;
}

OracleResult fixed_support_optimum(const DesignProblem& dp, const SelectionMask& mask) {
    if (mask.size() != dp.n()) throw DimensionError("fixed_support_optimum: mask length does not match grid");
    const int p = mask.count();
    const std::vector<int> idx = mask.indices();

    OracleResult out{mask, 0.0, {}};
    for (int l = 0; l < dp.num_targets(); ++l) {
        Eigen::MatrixXcd q(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) q(i, j) = dp.qmat[static_cast<size_t>(l)](idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        const ComplexVector a = restrict_to(dp.target_vectors[static_cast<size_t>(l)], mask);
        Eigen::LLT<Eigen::MatrixXcd> llt(q);
        if (llt.info() != Eigen::Success)
            throw SingularityError("fixed_support_optimum: restricted Qmat for target " + std::to_string(l) +
                                   " is not positive definite (rho_l = 0?)");
        const ComplexVector z = llt.solve(a);
        const double d = a.dot(z).real();
        if (!(d > 0.0))
            throw SingularityError("fixed_support_optimum: degenerate a^H Q^-1 a for target " + std::to_string(l));
        out.value += 1.0 / d;
        out.per_target_vectors.push_back(z / d);
    }
    return out;
}

DesignResult fixed_support_design(const DesignProblem& dp, const SelectionMask& mask) {
    const OracleResult oracle = fixed_support_optimum(dp, mask);
    const int n = dp.n();
    const std::vector<int> idx = mask.indices();
    const int p = mask.count();

    DesignResult out{mask,
                     std::vector<HermitianMatrix>(),
                     HermitianMatrix::Zero(n, n),
                     1.0,
                     oracle.value,
                     std::vector<ComplexVector>(),
                     std::vector<double>(),
                     std::vector<bool>()};
    for (int l = 0; l < dp.num_targets(); ++l) {
        const ComplexVector& r_sup = oracle.per_target_vectors[static_cast<size_t>(l)];
        ComplexVector r_full = ComplexVector::Zero(n);
        for (int i = 0; i < p; ++i) r_full(idx[static_cast<size_t>(i)]) = r_sup(i);
        HermitianMatrix rl = r_full * r_full.adjoint();
        out.composite += rl;
        out.constituents.push_back(std::move(rl));
        out.rank1_vectors.push_back(std::move(r_full));
        out.rank_ratios.push_back(0.0);  // exact rank 1 by construction
        out.rank1_fallback.push_back(false);
    }
    return out;
}

EnumerationOutcome enumerate_best(const DesignProblem& dp, int budget_p, const EnumerationOptions& opts) {
    const int n = dp.n();
    if (budget_p < 1 || budget_p > n) throw ValidationError("budget_p: must satisfy 1 <= P <= n");
    const long long total = combination_count(n, budget_p);
    if (total > opts.cap)
        throw SizeError("enumerate_best: C(" + std::to_string(n) + "," + std::to_string(budget_p) + ") = " +
                        std::to_string(total) + " exceeds the cap " + std::to_string(opts.cap) +
                        "; use a smaller instance or raise --cap");
    if (n > 63) throw SizeError("enumerate_best: grids beyond 63 candidates are not supported");

    const int jobs = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
    const long long chunk_size = std::max<long long>(256, (total + 8LL * jobs - 1) / (8LL * jobs));
    const int num_chunks = static_cast<int>((total + chunk_size - 1) / chunk_size);

    std::vector<Extreme> chunk_best(static_cast<size_t>(num_chunks));
    std::vector<Extreme> chunk_worst(static_cast<size_t>(num_chunks));
    std::vector<EnumerationRow> table;
    if (opts.keep_table) table.resize(static_cast<size_t>(total));

    bool singular = false;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int ci = 0; ci < num_chunks; ++ci) {
        const long long begin = static_cast<long long>(ci) * chunk_size;
        const long long end = std::min(total, begin + chunk_size);
        std::vector<int> idx(static_cast<size_t>(budget_p));
        unrank_combination(begin, n, budget_p, idx.data());
        SupportEvaluator eval(dp, budget_p);
        Extreme lo, hi;
        for (long long r = begin; r < end; ++r) {
            const double v = eval.value(idx.data());
            if (v < 0.0) {
#pragma omp atomic write
                singular = true;
                break;
            }
            const std::uint64_t bits = mask_bits_of(idx.data(), budget_p);
            lo.take_min(v, bits);
            hi.take_max(v, bits);
            if (opts.keep_table) table[static_cast<size_t>(r)] = {bits, v};
            next_combination(idx.data(), n, budget_p);
        }
        chunk_best[static_cast<size_t>(ci)] = lo;
        chunk_worst[static_cast<size_t>(ci)] = hi;
    }
    if (singular)
        throw SingularityError("enumerate_best: a restricted Qmat was not positive definite (rho_l = 0?)");

    Extreme best, worst;
    for (int ci = 0; ci < num_chunks; ++ci) {
        if (chunk_best[static_cast<size_t>(ci)].set) best.take_min(chunk_best[static_cast<size_t>(ci)].value, chunk_best[static_cast<size_t>(ci)].bits);
        if (chunk_worst[static_cast<size_t>(ci)].set) worst.take_max(chunk_worst[static_cast<size_t>(ci)].value, chunk_worst[static_cast<size_t>(ci)].bits);
    }

    if (opts.keep_table) {
        std::sort(table.begin(), table.end(), [](const EnumerationRow& a, const EnumerationRow& b) {
            if (a.value != b.value) return a.value < b.value;
            return bits_lex_before(a.mask_bits, b.mask_bits);
        });
    }

    EnumerationOutcome out{fixed_support_optimum(dp, mask_from_bits(best.bits, n)),
                           fixed_support_optimum(dp, mask_from_bits(worst.bits, n)), std::move(table)};
    return out;
}

EnumerationOutcome enumerate_best_serial(const DesignProblem& dp, int budget_p, const EnumerationOptions& opts) {
    const int n = dp.n();
    if (budget_p < 1 || budget_p > n) throw ValidationError("budget_p: must satisfy 1 <= P <= n");
    const long long total = combination_count(n, budget_p);
    if (total > opts.cap)
        throw SizeError("enumerate_best: subset count " + std::to_string(total) + " exceeds the cap " +
                        std::to_string(opts.cap));
    if (n > 63) throw SizeError("enumerate_best: grids beyond 63 candidates are not supported");

    std::vector<int> idx(static_cast<size_t>(budget_p));
    for (int k = 0; k < budget_p; ++k) idx[static_cast<size_t>(k)] = k;
    SupportEvaluator eval(dp, budget_p);
    Extreme best, worst;
    std::vector<EnumerationRow> table;
    if (opts.keep_table) table.reserve(static_cast<size_t>(total));
    for (long long r = 0; r < total; ++r) {
        const double v = eval.value(idx.data());
        if (v < 0.0) throw SingularityError("enumerate_best: a restricted Qmat was not positive definite");
        const std::uint64_t bits = mask_bits_of(idx.data(), budget_p);
        best.take_min(v, bits);
        worst.take_max(v, bits);
        if (opts.keep_table) table.push_back({bits, v});
        next_combination(idx.data(), n, budget_p);
    }
    if (opts.keep_table) {
        std::sort(table.begin(), table.end(), [](const EnumerationRow& a, const EnumerationRow& b) {
            if (a.value != b.value) return a.value < b.value;
            return bits_lex_before(a.mask_bits, b.mask_bits);
        });
    }
    return {fixed_support_optimum(dp, mask_from_bits(best.bits, n)),
            fixed_support_optimum(dp, mask_from_bits(worst.bits, n)), std::move(table)};
}

SelectionMask ula_mask(int n, int p) {
    if (p < 1 || p > n) throw ValidationError("ula_mask: need 1 <= p <= n");
    std::vector<bool> active(static_cast<size_t>(n), false);
    for (int k = 0; k < p; ++k) active[static_cast<size_t>(k)] = true;
    return SelectionMask(std::move(active));
}

SelectionMask nested_mask(int n, int p) {
    if (p < 1 || p > n) throw ValidationError("nested_mask: need 1 <= p <= n");
    const int n1 = (p + 1) / 2;
    const int n2 = p - n1;
    std::vector<bool> active(static_cast<size_t>(n), false);
    for (int k = 0; k < n1; ++k) active[static_cast<size_t>(k)] = true;
    int overflow = 0;
    for (int k = 1; k <= n2; ++k) {
        const int pos = (n1 + 1) * k - 1;
        if (pos < n && !active[static_cast<size_t>(pos)])
            active[static_cast<size_t>(pos)] = true;
        else
            ++overflow;
    }
    for (int k = 0; k < overflow; ++k) {  // pack onto the largest free slots above the dense level
        int pos = n - 1;
        while (pos >= n1 && active[static_cast<size_t>(pos)]) --pos;
        if (pos < n1)
            throw ConstructionError("nested_mask: cannot pack " + std::to_string(p) + " sensors into a grid of " +
                                    std::to_string(n) + "; pass an explicit mask instead");
        active[static_cast<size_t>(pos)] = true;
    }
    return SelectionMask(std::move(active));
}

SelectionMask random_mask(int n, int p, std::uint64_t seed) {
    if (p < 1 || p > n) throw ValidationError("random_mask: need 1 <= p <= n");
    std::mt19937_64 gen(seed);
    std::vector<int> pool(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) pool[static_cast<size_t>(k)] = k;
    std::vector<bool> active(static_cast<size_t>(n), false);
    for (int k = 0; k < p; ++k) {  // partial Fisher-Yates
        const std::uint64_t j = static_cast<std::uint64_t>(k) + draw_below(gen, static_cast<std::uint64_t>(n - k));
        std::swap(pool[static_cast<size_t>(k)], pool[j]);
        active[static_cast<size_t>(pool[static_cast<size_t>(k)])] = true;
    }
    return SelectionMask(std::move(active));
}

}  // namespace sparsebeam
