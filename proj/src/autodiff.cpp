#include "lira/autodiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace lira::ad {

namespace {

std::atomic<uint64_t> g_seq{1};

NodePtr new_node(Array value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->seq = g_seq.fetch_add(1);
    return n;
}

bool any_requires_grad(const std::vector<NodePtr>& parents) {
    for (const auto& p : parents)
        if (p->requires_grad) return true;
    return false;
}

void check_binary_shapes(const Array& a, const Array& b, const char* op) {
    if (!a.same_shape(b) && a.size() != 1 && b.size() != 1)
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    a.shape_str() + " vs " + b.shape_str());
}

// Elementwise binary helper: out[i] = f(a[bcast i], b[bcast i]).
template <typename F>
Array ew_binary(const Array& a, const Array& b, F f) {
    const Array& shape_src = a.size() == 1 ? b : a;
    Array out = shape_src.zeros_like();
    const bool sa = a.size() == 1, sb = b.size() == 1;
    for (int i = 0; i < out.size(); ++i)
        out[i] = f(a[sa ? 0 : i], b[sb ? 0 : i]);
    return out;
}

} // namespace

Var constant(Array v) {
    return Var(new_node(std::move(v)));
}

Var constant(double v) {
    return constant(Array::scalar(v));
}

Var parameter(Array v, std::string name) {
    auto n = new_node(std::move(v));
    n->requires_grad = true;
    n->is_param = true;
    n->name = std::move(name);
    return Var(n);
}

Var make_op(Array value, std::vector<NodePtr> parents, std::function<void(Node&)> backward) {
    auto n = new_node(std::move(value));
    n->requires_grad = any_requires_grad(parents);
    if (n->requires_grad) {
        n->parents = std::move(parents);
        n->backward = std::move(backward);
    }
    return Var(n);
}

void accumulate_grad(Node& dst, const Array& g) {
    if (!dst.requires_grad) return;
    if (dst.value.size() == 1 && g.size() > 1) {
        dst.grad[0] += g.sum();
        return;
    }
    for (int i = 0; i < g.size(); ++i) dst.grad[i] += g[i];
}

namespace {

// Shared backward for elementwise binary ops: df_a(i) and df_b(i) give the
// local partials at flat index i of the output.
template <typename Fa, typename Fb>
std::function<void(Node&)> ew_backward(Fa df_a, Fb df_b) {
    return [df_a, df_b](Node& n) {
        Node& a = *n.parents[0];
        Node& b = *n.parents[1];
        const bool sa = a.value.size() == 1, sb = b.value.size() == 1;
        if (a.requires_grad) {
            for (int i = 0; i < n.grad.size(); ++i)
                a.grad[sa ? 0 : i] += n.grad[i] * df_a(n, i);
        }
        if (b.requires_grad) {
            for (int i = 0; i < n.grad.size(); ++i)
                b.grad[sb ? 0 : i] += n.grad[i] * df_b(n, i);
        }
    };
}

double pval(const Node& n, int parent, int i) {
    const Array& v = n.parents[static_cast<size_t>(parent)]->value;
    return v[v.size() == 1 ? 0 : i];
}

} // namespace

Var add(const Var& a, const Var& b) {
    check_binary_shapes(a.value(), b.value(), "add");
    return make_op(ew_binary(a.value(), b.value(), [](double x, double y) { return x + y; }),
                   {a.ptr(), b.ptr()},
                   ew_backward([](Node&, int) { return 1.0; }, [](Node&, int) { return 1.0; }));
}

Var sub(const Var& a, const Var& b) {
    check_binary_shapes(a.value(), b.value(), "sub");
    return make_op(ew_binary(a.value(), b.value(), [](double x, double y) { return x - y; }),
                   {a.ptr(), b.ptr()},
                   ew_backward([](Node&, int) { return 1.0; }, [](Node&, int) { return -1.0; }));
}

Var mul(const Var& a, const Var& b) {
    check_binary_shapes(a.value(), b.value(), "mul");
    return make_op(ew_binary(a.value(), b.value(), [](double x, double y) { return x * y; }),
                   {a.ptr(), b.ptr()},
                   ew_backward([](Node& n, int i) { return pval(n, 1, i); },
                               [](Node& n, int i) { return pval(n, 0, i); }));
}

Var div(const Var& a, const Var& b) {
    check_binary_shapes(a.value(), b.value(), "div");
    return make_op(ew_binary(a.value(), b.value(), [](double x, double y) { return x / y; }),
                   {a.ptr(), b.ptr()},
                   ew_backward([](Node& n, int i) { return 1.0 / pval(n, 1, i); },
                               [](Node& n, int i) {
                                   const double y = pval(n, 1, i);
                                   return -pval(n, 0, i) / (y * y);
                               }));
}

Var add(const Var& a, double b) { return add(a, constant(b)); }
Var sub(const Var& a, double b) { return sub(a, constant(b)); }
Var sub(double a, const Var& b) { return sub(constant(a), b); }
Var mul(const Var& a, double b) { return mul(a, constant(b)); }
Var div(double a, const Var& b) { return div(constant(a), b); }

namespace {

// Elementwise unary helper with local derivative df(x_in, y_out).
template <typename F, typename DF>
Var ew_unary(const Var& x, F f, DF df) {
    Array out = x.value().zeros_like();
    for (int i = 0; i < out.size(); ++i) out[i] = f(x.value()[i]);
    return make_op(std::move(out), {x.ptr()}, [df](Node& n) {
        Node& p = *n.parents[0];
        for (int i = 0; i < n.grad.size(); ++i)
            p.grad[i] += n.grad[i] * df(p.value[i], n.value[i]);
    });
}

} // namespace

Var neg(const Var& x) {
    return ew_unary(x, [](double v) { return -v; }, [](double, double) { return -1.0; });
}

Var exp_op(const Var& x) {
    return ew_unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var log_op(const Var& x) {
    return ew_unary(x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Var sqrt_op(const Var& x) {
    return ew_unary(x, [](double v) { return std::sqrt(v); },
                    [](double, double y) { return 0.5 / y; });
}

Var abs_op(const Var& x) {
    return ew_unary(x, [](double v) { return std::fabs(v); },
                    [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Var pow_op(const Var& x, double p) {
    return ew_unary(x, [p](double v) { return std::pow(v, p); },
                    [p](double v, double) { return p * std::pow(v, p - 1.0); });
}

Var clamp_op(const Var& x, double lo, double hi) {
    return ew_unary(x, [lo, hi](double v) { return std::min(hi, std::max(lo, v)); },
                    [lo, hi](double v, double) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Var square(const Var& x) {
    return ew_unary(x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Var matmul(const Var& a, const Var& b) {
    return make_op(matmul_value(a.value(), b.value()), {a.ptr(), b.ptr()}, [](Node& n) {
        Node& a = *n.parents[0];
        Node& b = *n.parents[1];
        if (a.requires_grad) matmul_acc_abt(a.grad, n.grad, b.value);
        if (b.requires_grad) matmul_acc_atb(b.grad, a.value, n.grad);
    });
}

Var add_rows(const Var& m, const Var& v) {
    const Array& mv = m.value();
    const Array& vv = v.value();
    if (mv.rank() != 2 || vv.rows() * (vv.rank() == 2 ? vv.cols() : 1) != mv.cols())
        throw std::invalid_argument("add_rows: shape mismatch");
    Array out = mv.zeros_like();
    for (int i = 0; i < mv.rows(); ++i)
        for (int j = 0; j < mv.cols(); ++j)
            out.at(i, j) = mv.at(i, j) + vv[j];
    return make_op(std::move(out), {m.ptr(), v.ptr()}, [](Node& n) {
        Node& m = *n.parents[0];
        Node& v = *n.parents[1];
        const int rows = n.value.rows(), cols = n.value.cols();
        if (m.requires_grad)
            for (int i = 0; i < n.grad.size(); ++i) m.grad[i] += n.grad[i];
        if (v.requires_grad)
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    v.grad[j] += n.grad.at(i, j);
    });
}

Var scale_rows(const Var& m, const Var& c) {
    const Array& mv = m.value();
    const Array& cv = c.value();
    if (mv.rank() != 2 || cv.size() != mv.rows())
        throw std::invalid_argument("scale_rows: shape mismatch");
    Array out = mv.zeros_like();
    for (int i = 0; i < mv.rows(); ++i)
        for (int j = 0; j < mv.cols(); ++j)
            out.at(i, j) = mv.at(i, j) * cv[i];
    return make_op(std::move(out), {m.ptr(), c.ptr()}, [](Node& n) {
        Node& m = *n.parents[0];
        Node& c = *n.parents[1];
        const int rows = n.value.rows(), cols = n.value.cols();
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                if (m.requires_grad) m.grad.at(i, j) += n.grad.at(i, j) * c.value[i];
                if (c.requires_grad) c.grad[i] += n.grad.at(i, j) * m.value.at(i, j);
            }
        }
    });
}

Var slice_cols(const Var& m, int c0, int c1) {
    const Array& mv = m.value();
    if (mv.rank() != 2 || c0 < 0 || c1 > mv.cols() || c0 >= c1)
        throw std::invalid_argument("slice_cols: bad range");
    Array out = Array::mat(mv.rows(), c1 - c0);
    for (int i = 0; i < mv.rows(); ++i)
        for (int j = c0; j < c1; ++j)
            out.at(i, j - c0) = mv.at(i, j);
    return make_op(std::move(out), {m.ptr()}, [c0](Node& n) {
        Node& m = *n.parents[0];
        for (int i = 0; i < n.value.rows(); ++i)
            for (int j = 0; j < n.value.cols(); ++j)
                m.grad.at(i, j + c0) += n.grad.at(i, j);
    });
}

Var reshape(const Var& x, int rank, int rows, int cols) {
    return make_op(x.value().reshaped(rank, rows, cols), {x.ptr()}, [](Node& n) {
        Node& p = *n.parents[0];
        for (int i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
    });
}

Var concat_cols(const Var& a, const Var& b) {
    const Array& av = a.value();
    const Array& bv = b.value();
    if (av.rank() != 2 || bv.rank() != 2 || av.rows() != bv.rows())
        throw std::invalid_argument("concat_cols: shape mismatch");
    Array out = Array::mat(av.rows(), av.cols() + bv.cols());
    for (int i = 0; i < av.rows(); ++i) {
        for (int j = 0; j < av.cols(); ++j) out.at(i, j) = av.at(i, j);
        for (int j = 0; j < bv.cols(); ++j) out.at(i, av.cols() + j) = bv.at(i, j);
    }
    const int ac = av.cols();
    return make_op(std::move(out), {a.ptr(), b.ptr()}, [ac](Node& n) {
        Node& a = *n.parents[0];
        Node& b = *n.parents[1];
        for (int i = 0; i < n.value.rows(); ++i) {
            for (int j = 0; j < n.value.cols(); ++j) {
                const double g = n.grad.at(i, j);
                if (j < ac) {
                    if (a.requires_grad) a.grad.at(i, j) += g;
                } else if (b.requires_grad) {
                    b.grad.at(i, j - ac) += g;
                }
            }
        }
    });
}

Var sum_all(const Var& x) {
    return make_op(Array::scalar(x.value().sum()), {x.ptr()}, [](Node& n) {
        Node& p = *n.parents[0];
        for (int i = 0; i < p.grad.size(); ++i) p.grad[i] += n.grad[0];
    });
}

Var mean_all(const Var& x) {
    const double inv = 1.0 / x.value().size();
    return make_op(Array::scalar(x.value().sum() * inv), {x.ptr()}, [inv](Node& n) {
        Node& p = *n.parents[0];
        for (int i = 0; i < p.grad.size(); ++i) p.grad[i] += n.grad[0] * inv;
    });
}

Var row_sum(const Var& m) {
    const Array& mv = m.value();
    if (mv.rank() != 2) throw std::invalid_argument("row_sum: rank-2 input required");
    Array out = Array::vec(mv.rows());
    for (int i = 0; i < mv.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < mv.cols(); ++j) s += mv.at(i, j);
        out[i] = s;
    }
    return make_op(std::move(out), {m.ptr()}, [](Node& n) {
        Node& p = *n.parents[0];
        for (int i = 0; i < p.value.rows(); ++i)
            for (int j = 0; j < p.value.cols(); ++j)
                p.grad.at(i, j) += n.grad[i];
    });
}

Var row_mean(const Var& m) {
    return mul(row_sum(m), 1.0 / m.value().cols());
}

namespace {

Var extreme_all(const Var& x, bool take_max) {
    const Array& v = x.value();
    int best = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (take_max ? v[i] > v[best] : v[i] < v[best]) best = i;
    }
    return make_op(Array::scalar(v[best]), {x.ptr()}, [best](Node& n) {
        n.parents[0]->grad[best] += n.grad[0];
    });
}

} // namespace

Var min_all(const Var& x) { return extreme_all(x, false); }
Var max_all(const Var& x) { return extreme_all(x, true); }

Var softmax_rows(const Var& x) {
    const Array& v = x.value();
    const int rows = v.rank() == 2 ? v.rows() : 1;
    const int cols = v.rank() == 2 ? v.cols() : v.size();
    Array out = v.zeros_like();
    for (int i = 0; i < rows; ++i) {
        const double* row = v.data() + static_cast<size_t>(i) * cols;
        double* orow = out.data() + static_cast<size_t>(i) * cols;
        double mx = row[0];
        for (int j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < cols; ++j) {
            orow[j] = std::exp(row[j] - mx);
            z += orow[j];
        }
        for (int j = 0; j < cols; ++j) orow[j] /= z;
    }
    return make_op(std::move(out), {x.ptr()}, [rows, cols](Node& n) {
        Node& p = *n.parents[0];
        for (int i = 0; i < rows; ++i) {
            const double* y = n.value.data() + static_cast<size_t>(i) * cols;
            const double* g = n.grad.data() + static_cast<size_t>(i) * cols;
            double dot = 0.0;
            for (int j = 0; j < cols; ++j) dot += y[j] * g[j];
            double* pg = p.grad.data() + static_cast<size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) pg[j] += y[j] * (g[j] - dot);
        }
    });
}

Var detach(const Var& x) {
    return constant(x.value());
}

Var grl(const Var& x) {
    return make_op(x.value(), {x.ptr()}, [](Node& n) {
        Node& p = *n.parents[0];
        for (int i = 0; i < n.grad.size(); ++i) p.grad[i] -= n.grad[i];
    });
}

void backward(const Var& root) {
    backward(root, [&] {
        Array seed = root.value().zeros_like();
        for (int i = 0; i < seed.size(); ++i) seed[i] = 1.0;
        return seed;
    }());
}

void backward(const Var& root, const Array& seed) {
    if (!root.defined() || !root.node()->requires_grad) return;
    if (!seed.same_shape(root.value()))
        throw std::invalid_argument("backward: seed shape mismatch");

    // Iterative post-order DFS: every node appears after all of its parents.
    std::vector<Node*> topo;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, size_t>> stack;
    stack.emplace_back(root.node(), 0);
    visited.insert(root.node());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && !visited.count(parent)) {
                visited.insert(parent);
                stack.emplace_back(parent, 0);
            }
        } else {
            topo.push_back(node);
            stack.pop_back();
        }
    }

    for (Node* n : topo) {
        n->grad = n->value.zeros_like();
        n->grad_ready = true;
    }
    root.node()->grad = seed;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        Node* n = *it;
        if (n->backward) n->backward(*n);
    }
}

} // namespace lira::ad
