#pragma once

#include "bpl/matrix.hpp"

#include <string>
#include <vector>

namespace bpl {

// A(B,k,l): the base matrix B expanded so that block (i,j) is a k_i x l_j
// constant block of value b_ij.
class BlockSpec {
public:
    // Throws InvalidSpec on nonpositive entries, zero multiplicities or
    // unequal multiplicity sums.
    BlockSpec(DenseMatrix B, std::vector<int> k, std::vector<int> l);

    int m() const { return static_cast<int>(k_.size()); }
    int n() const { return n_; }
    const DenseMatrix& B() const { return B_; }
    double b(int i, int j) const { return B_(i, j); }
    const std::vector<int>& k() const { return k_; }
    const std::vector<int>& l() const { return l_; }

    // Same multiplicities, B multiplied by c.
    BlockSpec scaled(double c) const;

private:
    DenseMatrix B_;
    std::vector<int> k_;
    std::vector<int> l_;
    int n_ = 0;
};

DenseMatrix expand_block(const BlockSpec& spec);

// b_ij = q_i^{mu_j}.
DenseMatrix pml_block_base(const std::vector<double>& q, const std::vector<double>& mu);

// Groups identical rows and then identical columns of A into a spec. Types
// appear in order of first occurrence.
BlockSpec compress_block(const DenseMatrix& A);

// All-one base with uniform multiplicities nbar.
BlockSpec all_one_spec(int m, int nbar);

// JSON with "m", "k", "l" and either "B" or "q" + "mu".
BlockSpec parse_block_spec_json(const std::string& text);
BlockSpec load_block_spec(const std::string& path);
std::string block_spec_to_json(const BlockSpec& spec);

}  // namespace bpl
