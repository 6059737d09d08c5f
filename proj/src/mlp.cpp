#include "drlnav/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drlnav/errors.hpp"

namespace drlnav {

namespace {

void apply_activation(Activation act, const Matrix& pre, Matrix& post) {
    post = pre;
    switch (act) {
        case Activation::Linear:
            break;
        case Activation::Relu:
            for (auto& v : post.data)
                if (v < 0) v = 0;
            break;
        case Activation::Tanh:
            for (auto& v : post.data) v = std::tanh(v);
            break;
    }
}

// Derivative of the activation, recovered from the post-activation value.
double activation_grad(Activation act, double post) {
    switch (act) {
        case Activation::Linear: return 1.0;
        case Activation::Relu: return post > 0 ? 1.0 : 0.0;
        case Activation::Tanh: return 1.0 - post * post;
    }
    return 1.0;
}

void column_sums(const Matrix& m, std::vector<double>& out) {
    out.assign(m.cols, 0.0);
    for (int r = 0; r < m.rows; ++r) axpy(1.0, m.row(r), out);
}

DenseLayer make_layer(int in, int out, Activation act, Rng& rng) {
    DenseLayer layer;
    layer.w = Matrix(out, in);
    layer.b.assign(out, 0.0);
    layer.act = act;
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : layer.w.data) v = dist(rng);
    for (auto& v : layer.b) v = dist(rng);
    return layer;
}

void check_specs(const std::vector<LayerSpec>& specs) {
    if (specs.empty()) throw std::invalid_argument("mlp: need at least one layer");
    for (size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].in < 1 || specs[i].out < 1)
            throw std::invalid_argument("mlp: layer widths must be >= 1");
        if (i > 0 && specs[i].in != specs[i - 1].out)
            throw std::invalid_argument("mlp: consecutive layer widths do not chain");
    }
}

// Dense affine step: z = x * w^T + b.
void affine(const Matrix& x, const DenseLayer& layer, Matrix& z) {
    z = Matrix(x.rows, layer.w.rows);
    matmul_nt(x, layer.w, z);
    for (int r = 0; r < z.rows; ++r) axpy(1.0, layer.b, z.row(r));
}

}  // namespace

Mlp Mlp::plain(const std::vector<LayerSpec>& specs, Rng& rng) {
    check_specs(specs);
    Mlp net;
    net.head_ = Head::Plain;
    for (const auto& s : specs) net.trunk_.push_back(make_layer(s.in, s.out, s.act, rng));
    return net;
}

Mlp Mlp::dueling(const std::vector<LayerSpec>& hidden, int action_count, Rng& rng) {
    check_specs(hidden);
    if (action_count < 1) throw std::invalid_argument("mlp: dueling head needs >= 1 action");
    Mlp net;
    net.head_ = Head::Dueling;
    for (const auto& s : hidden) net.trunk_.push_back(make_layer(s.in, s.out, s.act, rng));
    const int h = hidden.back().out;
    net.value_ = make_layer(h, 1, Activation::Linear, rng);
    net.advantage_ = make_layer(h, action_count, Activation::Linear, rng);
    return net;
}

int Mlp::input_width() const { return trunk_.empty() ? 0 : trunk_.front().w.cols; }

int Mlp::output_width() const {
    if (head_ == Head::Dueling) return advantage_.w.rows;
    return trunk_.empty() ? 0 : trunk_.back().w.rows;
}

int Mlp::unit_count() const {
    return static_cast<int>(trunk_.size()) + (head_ == Head::Dueling ? 2 : 0);
}

size_t Mlp::param_count() const {
    size_t n = 0;
    for (const auto& l : trunk_) n += l.w.data.size() + l.b.size();
    if (head_ == Head::Dueling) {
        n += value_.w.data.size() + value_.b.size();
        n += advantage_.w.data.size() + advantage_.b.size();
    }
    return n;
}

std::vector<std::span<double>> Mlp::param_blocks() {
    std::vector<std::span<double>> blocks;
    auto add = [&](DenseLayer& l) {
        blocks.emplace_back(l.w.data);
        blocks.emplace_back(l.b);
    };
    for (auto& l : trunk_) add(l);
    if (head_ == Head::Dueling) {
        add(value_);
        add(advantage_);
    }
    return blocks;
}

std::vector<std::span<const double>> Mlp::param_blocks() const {
    std::vector<std::span<const double>> blocks;
    auto add = [&](const DenseLayer& l) {
        blocks.emplace_back(l.w.data);
        blocks.emplace_back(l.b);
    };
    for (const auto& l : trunk_) add(l);
    if (head_ == Head::Dueling) {
        add(value_);
        add(advantage_);
    }
    return blocks;
}

bool Mlp::same_architecture(const Mlp& o) const {
    if (head_ != o.head_ || trunk_.size() != o.trunk_.size()) return false;
    for (size_t i = 0; i < trunk_.size(); ++i) {
        if (!trunk_[i].w.same_shape(o.trunk_[i].w) || trunk_[i].act != o.trunk_[i].act)
            return false;
    }
    if (head_ == Head::Dueling) {
        if (!value_.w.same_shape(o.value_.w) || !advantage_.w.same_shape(o.advantage_.w))
            return false;
    }
    return true;
}

MlpGrads Mlp::zero_grads() const {
    MlpGrads g;
    auto add = [&](const DenseLayer& l) {
        DenseGrad dg;
        dg.dw = Matrix(l.w.rows, l.w.cols);
        dg.db.assign(l.b.size(), 0.0);
        g.units.push_back(std::move(dg));
    };
    for (const auto& l : trunk_) add(l);
    if (head_ == Head::Dueling) {
        add(value_);
        add(advantage_);
    }
    return g;
}

BatchTrace Mlp::forward(const Matrix& input) const {
    if (input.cols != input_width() || input.rows < 1)
        throw std::invalid_argument("mlp forward: input width mismatch");
    BatchTrace t;
    t.batch = input.rows;
    t.input = input;
    const Matrix* x = &t.input;
    for (const auto& layer : trunk_) {
        Matrix z;
        affine(*x, layer, z);
        Matrix a;
        apply_activation(layer.act, z, a);
        t.pre.push_back(std::move(z));
        t.post.push_back(std::move(a));
        x = &t.post.back();
    }
    if (head_ == Head::Plain) {
        t.output = t.post.back();
        return t;
    }
    affine(t.post.back(), value_, t.value_pre);
    affine(t.post.back(), advantage_, t.adv_pre);
    const int actions = advantage_.w.rows;
    t.output = Matrix(t.batch, actions);
    for (int b = 0; b < t.batch; ++b) {
        auto q = dueling_combine(t.value_pre(b, 0), t.adv_pre.row(b));
        std::copy(q.begin(), q.end(), t.output.row(b).begin());
    }
    return t;
}

BatchTrace Mlp::forward(const OneHotBatch& input) const {
    if (input.width != input_width() || input.rows() < 1)
        throw std::invalid_argument("mlp forward: one-hot width mismatch");
    for (int idx : input.indices)
        if (idx < 0 || idx >= input.width)
            throw std::invalid_argument("mlp forward: one-hot index out of range");
    BatchTrace t;
    t.batch = input.rows();
    t.onehot = input;
    // First layer reduces to a column gather.
    const DenseLayer& first = trunk_.front();
    Matrix z0(t.batch, first.w.rows);
    for (int b = 0; b < t.batch; ++b) {
        const int idx = input.indices[b];
        auto row = z0.row(b);
        for (int o = 0; o < first.w.rows; ++o) row[o] = first.w(o, idx) + first.b[o];
    }
    Matrix a0;
    apply_activation(first.act, z0, a0);
    t.pre.push_back(std::move(z0));
    t.post.push_back(std::move(a0));
    const Matrix* x = &t.post.back();
    for (size_t j = 1; j < trunk_.size(); ++j) {
        Matrix z;
        affine(*x, trunk_[j], z);
        Matrix a;
        apply_activation(trunk_[j].act, z, a);
        t.pre.push_back(std::move(z));
        t.post.push_back(std::move(a));
        x = &t.post.back();
    }
    if (head_ == Head::Plain) {
        t.output = t.post.back();
        return t;
    }
    affine(t.post.back(), value_, t.value_pre);
    affine(t.post.back(), advantage_, t.adv_pre);
    t.output = Matrix(t.batch, advantage_.w.rows);
    for (int b = 0; b < t.batch; ++b) {
        auto q = dueling_combine(t.value_pre(b, 0), t.adv_pre.row(b));
        std::copy(q.begin(), q.end(), t.output.row(b).begin());
    }
    return t;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
    Matrix x(1, static_cast<int>(input.size()));
    std::copy(input.begin(), input.end(), x.data.begin());
    BatchTrace t = forward(x);
    return {t.output.data.begin(), t.output.data.end()};
}

std::vector<double> Mlp::forward_onehot(int index, int width) const {
    OneHotBatch in{width, {index}};
    BatchTrace t = forward(in);
    return {t.output.data.begin(), t.output.data.end()};
}

MlpGrads Mlp::backward(const BatchTrace& trace, const Matrix& output_grad,
                       bool want_input_grad) const {
    const bool onehot = trace.onehot.width > 0;
    if (trace.pre.size() != trunk_.size() || trace.batch < 1)
        throw std::invalid_argument("mlp backward: trace does not match this net");
    if (onehot ? trace.onehot.width != input_width() : trace.input.cols != input_width())
        throw std::invalid_argument("mlp backward: trace does not match this net");
    for (size_t j = 0; j < trunk_.size(); ++j)
        if (trace.pre[j].cols != trunk_[j].w.rows || trace.pre[j].rows != trace.batch)
            throw std::invalid_argument("mlp backward: trace does not match this net");
    if (output_grad.rows != trace.batch || output_grad.cols != output_width())
        throw std::invalid_argument("mlp backward: output gradient shape mismatch");
    if (onehot && want_input_grad)
        throw std::invalid_argument("mlp backward: no input gradient for one-hot input");

    MlpGrads grads = zero_grads();
    const size_t k = trunk_.size();
    Matrix g;  // gradient w.r.t. the pre-activation of the current layer

    if (head_ == Head::Dueling) {
        const int actions = advantage_.w.rows;
        Matrix dvalue(trace.batch, 1);
        Matrix dadv(trace.batch, actions);
        for (int b = 0; b < trace.batch; ++b) {
            auto go = output_grad.row(b);
            double total = 0;
            for (double v : go) total += v;
            dvalue(b, 0) = total;
            const double mean = total / actions;
            auto da = dadv.row(b);
            for (int a = 0; a < actions; ++a) da[a] = go[a] - mean;
        }
        const Matrix& h = trace.post.back();
        matmul_tn_acc(dvalue, h, grads.units[k].dw);
        column_sums(dvalue, grads.units[k].db);
        matmul_tn_acc(dadv, h, grads.units[k + 1].dw);
        column_sums(dadv, grads.units[k + 1].db);
        // dH = dvalue * Wv + dadv * Wa
        Matrix dh(trace.batch, h.cols);
        matmul_nn(dvalue, value_.w, dh);
        Matrix dh2(trace.batch, h.cols);
        matmul_nn(dadv, advantage_.w, dh2);
        for (size_t i = 0; i < dh.data.size(); ++i) dh.data[i] += dh2.data[i];
        g = std::move(dh);
        for (size_t i = 0; i < g.data.size(); ++i)
            g.data[i] *= activation_grad(trunk_.back().act, h.data[i]);
    } else {
        g = output_grad;
        const Matrix& post = trace.post.back();
        for (size_t i = 0; i < g.data.size(); ++i)
            g.data[i] *= activation_grad(trunk_.back().act, post.data[i]);
    }

    for (size_t j = k; j-- > 0;) {
        if (j > 0) {
            const Matrix& x = trace.post[j - 1];
            matmul_tn_acc(g, x, grads.units[j].dw);
            column_sums(g, grads.units[j].db);
            Matrix dx(trace.batch, x.cols);
            matmul_nn(g, trunk_[j].w, dx);
            for (size_t i = 0; i < dx.data.size(); ++i)
                dx.data[i] *= activation_grad(trunk_[j - 1].act, x.data[i]);
            g = std::move(dx);
        } else if (onehot) {
            // dW for the first layer touches one column per row of the batch.
            Matrix& dw = grads.units[0].dw;
            for (int b = 0; b < trace.batch; ++b) {
                const int idx = trace.onehot.indices[b];
                auto gb = g.row(b);
                for (int o = 0; o < dw.rows; ++o) dw(o, idx) += gb[o];
            }
            column_sums(g, grads.units[0].db);
        } else {
            matmul_tn_acc(g, trace.input, grads.units[0].dw);
            column_sums(g, grads.units[0].db);
            if (want_input_grad) {
                grads.dinput = Matrix(trace.batch, input_width());
                matmul_nn(g, trunk_[0].w, grads.dinput);
            }
        }
    }
    return grads;
}

std::vector<double> dueling_combine(double value, std::span<const double> advantages) {
    if (advantages.empty()) throw std::invalid_argument("dueling_combine: empty advantages");
    double mean = 0;
    for (double a : advantages) mean += a;
    mean /= static_cast<double>(advantages.size());
    std::vector<double> q(advantages.size());
    for (size_t i = 0; i < advantages.size(); ++i) q[i] = value + advantages[i] - mean;
    return q;
}

std::pair<double, std::vector<double>> mse_loss(std::span<const double> pred,
                                                std::span<const double> target) {
    if (pred.size() != target.size() || pred.empty())
        throw std::invalid_argument("mse_loss: length mismatch");
    const double n = static_cast<double>(pred.size());
    double loss = 0;
    std::vector<double> grad(pred.size());
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        loss += d * d;
        grad[i] = 2.0 * d / n;
    }
    return {loss / n, std::move(grad)};
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau outside [0,1]");
    if (!target.same_architecture(source))
        throw std::invalid_argument("soft_update: architecture mismatch");
    auto dst = target.param_blocks();
    auto src = source.param_blocks();
    for (size_t b = 0; b < dst.size(); ++b)
        for (size_t i = 0; i < dst[b].size(); ++i)
            dst[b][i] = tau * src[b][i] + (1.0 - tau) * dst[b][i];
}

void hard_update(Mlp& target, const Mlp& source) {
    if (!target.same_architecture(source))
        throw std::invalid_argument("hard_update: architecture mismatch");
    auto dst = target.param_blocks();
    auto src = source.param_blocks();
    for (size_t b = 0; b < dst.size(); ++b)
        std::copy(src[b].begin(), src[b].end(), dst[b].begin());
}

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Linear: return "linear";
        case Activation::Tanh: return "tanh";
    }
    return "linear";
}

namespace {

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "linear") return Activation::Linear;
    if (s == "tanh") return Activation::Tanh;
    throw ParseError("checkpoint: unknown activation '" + s + "'");
}

// Hexfloat keeps the round trip bit-exact.
void write_values(std::ostream& os, std::span<const double> vals) {
    char buf[48];
    for (size_t i = 0; i < vals.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%a", vals[i]);
        os << (i ? " " : "") << buf;
    }
    os << "\n";
}

void read_values(std::istream& is, std::span<double> vals) {
    std::string tok;
    for (auto& v : vals) {
        if (!(is >> tok)) throw ParseError("checkpoint: truncated parameter data");
        char* end = nullptr;
        v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ParseError("checkpoint: bad parameter value '" + tok + "'");
    }
}

void write_layer(std::ostream& os, const DenseLayer& l) {
    os << "w " << l.w.rows << " " << l.w.cols << "\n";
    for (int r = 0; r < l.w.rows; ++r) write_values(os, l.w.row(r));
    os << "b " << l.b.size() << "\n";
    write_values(os, l.b);
}

void read_layer(std::istream& is, DenseLayer& l, int expect_rows, int expect_cols) {
    std::string tag;
    int rows = 0, cols = 0;
    if (!(is >> tag >> rows >> cols) || tag != "w" || rows != expect_rows || cols != expect_cols)
        throw ParseError("checkpoint: malformed weight block");
    l.w = Matrix(rows, cols);
    for (int r = 0; r < rows; ++r) read_values(is, l.w.row(r));
    size_t blen = 0;
    if (!(is >> tag >> blen) || tag != "b" || blen != static_cast<size_t>(rows))
        throw ParseError("checkpoint: malformed bias block");
    l.b.assign(blen, 0.0);
    read_values(is, l.b);
}

}  // namespace

void Mlp::save(std::ostream& os) const {
    os << "drlnav-net v1\n";
    os << "head " << (head_ == Head::Dueling ? "dueling" : "plain") << "\n";
    os << "trunk " << trunk_.size() << "\n";
    for (const auto& l : trunk_)
        os << "layer " << l.w.cols << " " << l.w.rows << " " << activation_name(l.act) << "\n";
    if (head_ == Head::Dueling) os << "actions " << advantage_.w.rows << "\n";
    for (const auto& l : trunk_) write_layer(os, l);
    if (head_ == Head::Dueling) {
        write_layer(os, value_);
        write_layer(os, advantage_);
    }
    os << "end\n";
}

Mlp Mlp::load(std::istream& is) {
    std::string magic, version;
    if (!(is >> magic >> version) || magic != "drlnav-net" || version != "v1")
        throw ParseError("checkpoint: not a drlnav-net v1 file");
    std::string tag, head_name;
    if (!(is >> tag >> head_name) || tag != "head")
        throw ParseError("checkpoint: missing head record");
    Mlp net;
    if (head_name == "plain")
        net.head_ = Head::Plain;
    else if (head_name == "dueling")
        net.head_ = Head::Dueling;
    else
        throw ParseError("checkpoint: unknown head '" + head_name + "'");
    size_t trunk_n = 0;
    if (!(is >> tag >> trunk_n) || tag != "trunk" || trunk_n == 0)
        throw ParseError("checkpoint: missing trunk record");
    std::vector<LayerSpec> specs(trunk_n);
    for (auto& s : specs) {
        std::string act;
        if (!(is >> tag >> s.in >> s.out >> act) || tag != "layer" || s.in < 1 || s.out < 1)
            throw ParseError("checkpoint: malformed layer record");
        s.act = activation_from_name(act);
    }
    check_specs(specs);
    int actions = 0;
    if (net.head_ == Head::Dueling) {
        if (!(is >> tag >> actions) || tag != "actions" || actions < 1)
            throw ParseError("checkpoint: malformed actions record");
    }
    net.trunk_.resize(trunk_n);
    for (size_t j = 0; j < trunk_n; ++j) {
        net.trunk_[j].act = specs[j].act;
        read_layer(is, net.trunk_[j], specs[j].out, specs[j].in);
    }
    if (net.head_ == Head::Dueling) {
        const int h = specs.back().out;
        net.value_.act = Activation::Linear;
        read_layer(is, net.value_, 1, h);
        net.advantage_.act = Activation::Linear;
        read_layer(is, net.advantage_, actions, h);
    }
    if (!(is >> tag) || tag != "end") throw ParseError("checkpoint: missing end marker");
    return net;
}

void Mlp::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    save(os);
    if (!os.good()) throw std::runtime_error("write failed for " + path);
}

Mlp Mlp::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return load(is);
}

}  // namespace drlnav
