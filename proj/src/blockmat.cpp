#include "bpl/blockmat.hpp"

#include "bpl/error.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace bpl {

BlockSpec::BlockSpec(DenseMatrix B, std::vector<int> k, std::vector<int> l)
    : B_(std::move(B)), k_(std::move(k)), l_(std::move(l)) {
    const std::size_t m = k_.size();
    if (m == 0) throw Error(ErrorKind::InvalidSpec, "m must be positive");
    if (l_.size() != m || B_.rows() != m || B_.cols() != m)
        throw Error(ErrorKind::InvalidSpec, "B must be m x m with m = |k| = |l|");
    for (double x : B_.data())
        if (!(x > 0) || !std::isfinite(x)) throw Error(ErrorKind::InvalidSpec, "base entries must be positive");
    for (int x : k_)
        if (x < 1) throw Error(ErrorKind::InvalidSpec, "row multiplicities must be >= 1");
    for (int x : l_)
        if (x < 1) throw Error(ErrorKind::InvalidSpec, "column multiplicities must be >= 1");
    n_ = std::accumulate(k_.begin(), k_.end(), 0);
    if (std::accumulate(l_.begin(), l_.end(), 0) != n_)
        throw Error(ErrorKind::InvalidSpec, "sum(k) != sum(l)");
}

BlockSpec BlockSpec::scaled(double c) const { return BlockSpec(B_.scaled(c), k_, l_); }

DenseMatrix expand_block(const BlockSpec& spec) {
    const int n = spec.n();
    DenseMatrix A(n);
    int r = 0;
    for (int i = 0; i < spec.m(); ++i) {
        for (int a = 0; a < spec.k()[i]; ++a, ++r) {
            int c = 0;
            for (int j = 0; j < spec.m(); ++j)
                for (int b = 0; b < spec.l()[j]; ++b, ++c) A(r, c) = spec.b(i, j);
        }
    }
    return A;
}

DenseMatrix pml_block_base(const std::vector<double>& q, const std::vector<double>& mu) {
    if (q.size() != mu.size() || q.empty()) throw Error(ErrorKind::InvalidSpec, "q and mu must have equal length m >= 1");
    for (double x : q)
        if (!(x > 0)) throw Error(ErrorKind::InvalidSpec, "q entries must be positive");
    for (double x : mu)
        if (!(x >= 0)) throw Error(ErrorKind::InvalidSpec, "mu entries must be nonnegative");
    const std::size_t m = q.size();
    DenseMatrix B(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) B(i, j) = std::pow(q[i], mu[j]);
    return B;
}

namespace {

// Labels each row by the first row with identical content.
std::vector<int> group_rows(const DenseMatrix& A, std::vector<std::size_t>& reps) {
    std::vector<int> label(A.rows(), -1);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t g = 0; g < reps.size(); ++g) {
            if (std::equal(A.row(i), A.row(i) + A.cols(), A.row(reps[g]))) {
                label[i] = static_cast<int>(g);
                break;
            }
        }
        if (label[i] < 0) {
            label[i] = static_cast<int>(reps.size());
            reps.push_back(i);
        }
    }
    return label;
}

}  // namespace

BlockSpec compress_block(const DenseMatrix& A) {
    require_square(A, "compress_block");
    std::vector<std::size_t> row_reps, col_reps;
    auto row_label = group_rows(A, row_reps);
    DenseMatrix At = A.transpose();
    auto col_label = group_rows(At, col_reps);
    if (row_reps.size() != col_reps.size())
        throw Error(ErrorKind::InvalidSpec, "row and column type counts differ");
    const std::size_t m = row_reps.size();
    std::vector<int> k(m, 0), l(m, 0);
    for (int x : row_label) ++k[x];
    for (int x : col_label) ++l[x];
    DenseMatrix B(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) B(i, j) = A(row_reps[i], col_reps[j]);
    return BlockSpec(B, k, l);
}

BlockSpec all_one_spec(int m, int nbar) {
    return BlockSpec(DenseMatrix(static_cast<std::size_t>(m), 1.0), std::vector<int>(m, nbar), std::vector<int>(m, nbar));
}

BlockSpec parse_block_spec_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad JSON: ") + e.what());
    }
    try {
        auto k = j.at("k").get<std::vector<int>>();
        auto l = j.at("l").get<std::vector<int>>();
        DenseMatrix B;
        if (j.contains("B")) {
            B = DenseMatrix::from_rows(j.at("B").get<std::vector<std::vector<double>>>());
        } else if (j.contains("q") && j.contains("mu")) {
            B = pml_block_base(j.at("q").get<std::vector<double>>(), j.at("mu").get<std::vector<double>>());
        } else {
            throw Error(ErrorKind::InvalidSpec, "spec needs \"B\" or \"q\" and \"mu\"");
        }
        if (j.contains("m") && j.at("m").get<std::size_t>() != k.size())
            throw Error(ErrorKind::InvalidSpec, "\"m\" disagrees with the length of \"k\"");
        return BlockSpec(B, k, l);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad spec field: ") + e.what());
    }
}

BlockSpec load_block_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidSpec, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_block_spec_json(ss.str());
}

std::string block_spec_to_json(const BlockSpec& spec) {
    nlohmann::json j;
    j["m"] = spec.m();
    j["B"] = spec.B().to_rows();
    j["k"] = spec.k();
    j["l"] = spec.l();
    return j.dump();
}

}  // namespace bpl
