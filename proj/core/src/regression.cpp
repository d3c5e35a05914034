#include "sgcm/regression.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sgcm {

std::vector<double> RegressorSpec::default_lambda_grid() {
    std::vector<double> grid;
    for (int k = -6; k <= 2; ++k) grid.push_back(std::pow(10.0, k));
    return grid;
}

void RegressorSpec::validate() const {
    if (kind == Kind::kernel_ridge) {
        if (krr_lambda_grid.empty()) throw ParameterError("empty KRR lambda grid");
        for (double l : krr_lambda_grid) {
            if (!(l > 0.0)) throw ParameterError("KRR lambda values must be positive");
        }
    }
    if (kind == Kind::gradient_boosted_trees) {
        if (gbt_rounds < 0) throw ParameterError("gbt_rounds must be >= 0");
        if (gbt_depth < 1) throw ParameterError("gbt_depth must be >= 1");
        if (!(gbt_learning_rate > 0.0) || gbt_learning_rate > 1.0) {
            throw ParameterError("gbt_learning_rate must lie in (0, 1]");
        }
        if (!(gbt_subsample > 0.0) || gbt_subsample > 1.0) {
            throw ParameterError("gbt_subsample must lie in (0, 1]");
        }
    }
}

ZRepresentation ZRepresentation::features(Matrix z) {
    ZRepresentation r;
    r.kind = Kind::features;
    r.m = std::move(z);
    return r;
}

ZRepresentation ZRepresentation::gram(const GramMatrix& g) {
    ZRepresentation r;
    r.kind = Kind::gram;
    r.m = g.entries();
    return r;
}

Vector krr_fit_predict(const GramMatrix& Kz_train, const Vector& y,
                       const Matrix& Kz_eval_rows, double lambda) {
    const auto n = Kz_train.size();
    if (y.size() != n) throw ShapeError("KRR target length does not match Gram size");
    if (Kz_eval_rows.cols() != n) throw ShapeError("KRR eval rows do not match Gram size");
    if (!(lambda > 0.0)) throw ParameterError("KRR lambda must be positive");

    const double ybar = y.mean();
    Matrix ridge = Kz_train.entries();
    ridge.diagonal().array() += lambda;
    Eigen::LDLT<Matrix> solver(ridge);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("KRR system factorization failed");
    }
    const Vector coef = solver.solve(Vector(y.array() - ybar));
    if (!coef.allFinite()) throw NumericalError("KRR solve produced non-finite coefficients");
    return (Kz_eval_rows * coef).array() + ybar;
}

namespace {

constexpr double kGainTol = 1e-12;

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict_row(const Matrix& Z, Eigen::Index r) const {
        int cur = 0;
        while (nodes[static_cast<std::size_t>(cur)].feature >= 0) {
            const TreeNode& nd = nodes[static_cast<std::size_t>(cur)];
            cur = (Z(r, nd.feature) <= nd.threshold) ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(cur)].value;
    }
};

/// Exact greedy regression tree on the active rows.  `order` holds, per
/// feature, all training row indices sorted by feature value; rows outside
/// the current node are skipped during the scan.  Ties in split gain keep
/// the first candidate (lowest feature, lowest threshold), which makes the
/// fit deterministic.
class TreeBuilder {
public:
    TreeBuilder(const Matrix& Z, const Vector& residual,
                const std::vector<std::vector<int>>& order, int max_depth)
        : Z_(Z), residual_(residual), order_(order), max_depth_(max_depth),
          node_of_row_(static_cast<std::size_t>(Z.rows()), -1) {}

    Tree build(const std::vector<int>& rows) {
        Tree tree;
        double sum = 0.0;
        for (int r : rows) {
            node_of_row_[static_cast<std::size_t>(r)] = 0;
            sum += residual_[r];
        }
        tree.nodes.push_back(TreeNode{});
        grow(tree, 0, static_cast<long>(rows.size()), sum, 0);
        return tree;
    }

private:
    void grow(Tree& tree, int id, long count, double sum, int depth) {
        tree.nodes[static_cast<std::size_t>(id)].value = sum / static_cast<double>(count);
        if (depth >= max_depth_ || count < 2) return;

        const double parent_score = sum * sum / static_cast<double>(count);
        double best_score = -std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;

        for (std::size_t j = 0; j < order_.size(); ++j) {
            long nL = 0;
            double sL = 0.0;
            bool have_prev = false;
            double prev = 0.0;
            for (int idx : order_[j]) {
                if (node_of_row_[static_cast<std::size_t>(idx)] != id) continue;
                const double v = Z_(idx, static_cast<Eigen::Index>(j));
                if (have_prev && v > prev && nL > 0 && nL < count) {
                    const double sR = sum - sL;
                    const double nR = static_cast<double>(count - nL);
                    const double score = sL * sL / static_cast<double>(nL) + sR * sR / nR;
                    if (score > best_score && score - parent_score > kGainTol) {
                        best_score = score;
                        best_feature = static_cast<int>(j);
                        best_threshold = 0.5 * (prev + v);
                    }
                }
                sL += residual_[idx];
                ++nL;
                prev = v;
                have_prev = true;
            }
        }

        if (best_feature < 0) return;

        const int left = static_cast<int>(tree.nodes.size());
        const int right = left + 1;
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        {
            TreeNode& nd = tree.nodes[static_cast<std::size_t>(id)];
            nd.feature = best_feature;
            nd.threshold = best_threshold;
            nd.left = left;
            nd.right = right;
        }

        long countL = 0;
        double sumL = 0.0;
        for (int r = 0; r < static_cast<int>(node_of_row_.size()); ++r) {
            if (node_of_row_[static_cast<std::size_t>(r)] != id) continue;
            if (Z_(r, best_feature) <= best_threshold) {
                node_of_row_[static_cast<std::size_t>(r)] = left;
                ++countL;
                sumL += residual_[r];
            } else {
                node_of_row_[static_cast<std::size_t>(r)] = right;
            }
        }
        grow(tree, left, countL, sumL, depth + 1);
        grow(tree, right, count - countL, sum - sumL, depth + 1);
    }

    const Matrix& Z_;
    const Vector& residual_;
    const std::vector<std::vector<int>>& order_;
    int max_depth_;
    std::vector<int> node_of_row_;
};

}  // namespace

Vector gbt_fit_predict(const Matrix& Z_train, const Vector& y, const Matrix& Z_eval,
                       const RegressorSpec& spec, Rng& rng) {
    spec.validate();
    const auto n = Z_train.rows();
    const auto d = Z_train.cols();
    if (n == 0) throw EmptyInputError("empty GBT training sample");
    if (d < 1) throw ShapeError("GBT needs at least one feature");
    if (y.size() != n) throw ShapeError("GBT target length does not match rows");
    if (Z_eval.cols() != d) throw ShapeError("GBT eval features do not match training");

    const double base = y.mean();
    Vector train_pred = Vector::Constant(n, base);

    // Presort each feature once; every round reuses the ordering.
    std::vector<std::vector<int>> order(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
        auto& ord = order[static_cast<std::size_t>(j)];
        ord.resize(static_cast<std::size_t>(n));
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            const double va = Z_train(a, j);
            const double vb = Z_train(b, j);
            return va < vb || (va == vb && a < b);
        });
    }

    std::vector<int> all_rows(static_cast<std::size_t>(n));
    std::iota(all_rows.begin(), all_rows.end(), 0);
    const bool subsampling = spec.gbt_subsample < 1.0;
    const auto sample_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(spec.gbt_subsample * static_cast<double>(n)));

    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(spec.gbt_rounds));
    Vector residual(n);
    std::vector<int> round_rows = all_rows;

    for (int round = 0; round < spec.gbt_rounds; ++round) {
        residual = y - train_pred;
        if (subsampling) {
            round_rows = all_rows;
            rng.shuffle(round_rows);
            round_rows.resize(sample_size);
            std::sort(round_rows.begin(), round_rows.end());
        }
        TreeBuilder builder(Z_train, residual, order, spec.gbt_depth);
        Tree tree = builder.build(round_rows);
        for (Eigen::Index r = 0; r < n; ++r) {
            train_pred[r] += spec.gbt_learning_rate * tree.predict_row(Z_train, r);
        }
        trees.push_back(std::move(tree));
    }

    Vector out = Vector::Constant(Z_eval.rows(), base);
    for (const Tree& tree : trees) {
        for (Eigen::Index r = 0; r < Z_eval.rows(); ++r) {
            out[r] += spec.gbt_learning_rate * tree.predict_row(Z_eval, r);
        }
    }
    return out;
}

std::vector<int> draw_fold_assignment(int n1, int folds, Rng& rng) {
    if (folds < 2) throw ParameterError("cross-fitting needs at least 2 folds");
    if (n1 < folds) throw SampleSizeError("fewer observations than folds");
    std::vector<int> perm(static_cast<std::size_t>(n1));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<int> fold_of(static_cast<std::size_t>(n1), 0);
    for (int pos = 0; pos < n1; ++pos) {
        fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = pos % folds;
    }
    return fold_of;
}

namespace {

std::vector<std::vector<int>> fold_members(const std::vector<int>& fold_of, int folds) {
    std::vector<std::vector<int>> members(static_cast<std::size_t>(folds));
    for (int i = 0; i < static_cast<int>(fold_of.size()); ++i) {
        members[static_cast<std::size_t>(fold_of[static_cast<std::size_t>(i)])].push_back(i);
    }
    for (int f = 0; f < folds; ++f) {
        if (members[static_cast<std::size_t>(f)].size() < 2) {
            throw FoldSizeError("fold " + std::to_string(f) + " has fewer than 2 points");
        }
    }
    return members;
}

std::vector<int> complement_of(const std::vector<std::vector<int>>& members, int skip) {
    std::vector<int> out;
    for (int f = 0; f < static_cast<int>(members.size()); ++f) {
        if (f == skip) continue;
        out.insert(out.end(), members[static_cast<std::size_t>(f)].begin(),
                   members[static_cast<std::size_t>(f)].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Vector subvector(const Vector& v, const std::vector<int>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[idx[i]];
    return out;
}

Matrix subrows(const Matrix& m, const std::vector<int>& idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
    return out;
}

/// Inner cross-validation cells inside a training complement: the other
/// outer folds when there are at least two of them, otherwise a positional
/// halving of the complement (only reachable with folds = 2).
std::vector<std::vector<int>> inner_cells(const std::vector<std::vector<int>>& members,
                                          int skip, const std::vector<int>& complement) {
    if (static_cast<int>(members.size()) >= 3) {
        std::vector<std::vector<int>> cells;
        for (int f = 0; f < static_cast<int>(members.size()); ++f) {
            if (f != skip) cells.push_back(members[static_cast<std::size_t>(f)]);
        }
        return cells;
    }
    std::vector<std::vector<int>> cells(2);
    for (std::size_t i = 0; i < complement.size(); ++i) {
        cells[i % 2].push_back(complement[i]);
    }
    return cells;
}

}  // namespace

ResidualScores cross_fit_residuals(const Matrix& scores, const ZRepresentation& z,
                                   const RegressorSpec& spec, int folds, Rng& rng) {
    spec.validate();
    const int n1 = static_cast<int>(scores.rows());
    const int P = static_cast<int>(scores.cols());
    if (P < 1) throw ShapeError("score matrix has no columns");
    if (z.m.rows() != n1) throw ShapeError("Z representation does not match score rows");
    if (z.kind == ZRepresentation::Kind::gram && z.m.cols() != n1) {
        throw ShapeError("Z Gram matrix must be square over I1");
    }
    if (spec.kind == RegressorSpec::Kind::gradient_boosted_trees &&
        z.kind != ZRepresentation::Kind::features) {
        throw ParameterError("GBT learner requires a feature representation of Z");
    }
    if (spec.kind == RegressorSpec::Kind::kernel_ridge &&
        z.kind != ZRepresentation::Kind::gram) {
        throw ParameterError("kernel ridge learner requires a Gram representation of Z");
    }

    const std::vector<int> fold_of = draw_fold_assignment(n1, folds, rng);
    const auto members = fold_members(fold_of, folds);

    Matrix residuals(n1, P);

    for (int f = 0; f < folds; ++f) {
        const auto& hold = members[static_cast<std::size_t>(f)];
        const std::vector<int> train = complement_of(members, f);

        switch (spec.kind) {
            case RegressorSpec::Kind::oracle_mean: {
                for (int p = 0; p < P; ++p) {
                    const double mean = subvector(scores.col(p), train).mean();
                    for (int i : hold) residuals(i, p) = scores(i, p) - mean;
                }
                break;
            }
            case RegressorSpec::Kind::gradient_boosted_trees: {
                const Matrix Ztr = subrows(z.m, train);
                const Matrix Zev = subrows(z.m, hold);
                for (int p = 0; p < P; ++p) {
                    Rng child = rng.spawn(static_cast<std::uint64_t>(p) *
                                              static_cast<std::uint64_t>(folds) +
                                          static_cast<std::uint64_t>(f) + 1);
                    const Vector pred =
                        gbt_fit_predict(Ztr, subvector(scores.col(p), train), Zev, spec, child);
                    for (std::size_t i = 0; i < hold.size(); ++i) {
                        residuals(hold[i], p) =
                            scores(hold[i], p) - pred[static_cast<Eigen::Index>(i)];
                    }
                }
                break;
            }
            case RegressorSpec::Kind::kernel_ridge: {
                const auto cells = inner_cells(members, f, train);
                const std::size_t L = spec.krr_lambda_grid.size();

                // Cross-fitted squared error inside the training complement,
                // accumulated per (lambda, coordinate). Factorizations are
                // shared across coordinates.
                Matrix cv_err = Matrix::Zero(static_cast<Eigen::Index>(L), P);
                for (const auto& cell : cells) {
                    std::vector<int> inner_train;
                    for (const auto& other : cells) {
                        if (&other == &cell) continue;
                        inner_train.insert(inner_train.end(), other.begin(), other.end());
                    }
                    std::sort(inner_train.begin(), inner_train.end());
                    const GramMatrix Ktr(submatrix(z.m, inner_train, inner_train));
                    const Matrix Kev = submatrix(z.m, cell, inner_train);
                    for (std::size_t li = 0; li < L; ++li) {
                        for (int p = 0; p < P; ++p) {
                            const Vector pred =
                                krr_fit_predict(Ktr, subvector(scores.col(p), inner_train),
                                                Kev, spec.krr_lambda_grid[li]);
                            for (std::size_t i = 0; i < cell.size(); ++i) {
                                const double e = scores(cell[i], p) -
                                                 pred[static_cast<Eigen::Index>(i)];
                                cv_err(static_cast<Eigen::Index>(li), p) += e * e;
                            }
                        }
                    }
                }

                const GramMatrix Ktr(submatrix(z.m, train, train));
                const Matrix Kev = submatrix(z.m, hold, train);
                for (int p = 0; p < P; ++p) {
                    Eigen::Index best = 0;
                    cv_err.col(p).minCoeff(&best);
                    const Vector pred =
                        krr_fit_predict(Ktr, subvector(scores.col(p), train), Kev,
                                        spec.krr_lambda_grid[static_cast<std::size_t>(best)]);
                    for (std::size_t i = 0; i < hold.size(); ++i) {
                        residuals(hold[i], p) =
                            scores(hold[i], p) - pred[static_cast<Eigen::Index>(i)];
                    }
                }
                break;
            }
        }
    }

    if (!residuals.allFinite()) throw NumericalError("cross-fitting produced non-finite residuals");
    return ResidualScores{std::move(residuals)};
}

}  // namespace sgcm
