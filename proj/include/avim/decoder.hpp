#pragma once

// Linear readout over AVI firing-rate patterns. Column k holds the
// L2-normalized mean pattern of class k; learning class k never touches any
// other column.

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "encoding.hpp"
#include "error.hpp"

namespace avim {

class decoder {
public:
    decoder() = default;
    decoder(int n_av, int classes):
        n_av_(n_av), classes_(classes),
        w_(static_cast<std::size_t>(n_av) * static_cast<std::size_t>(classes), 0.0),
        learned_(static_cast<std::size_t>(classes), false)
    {
        if (n_av < 1 || classes < 1) throw config_error("decoder needs positive dimensions");
    }

    int n_av() const { return n_av_; }
    int classes() const { return classes_; }
    bool learned(int k) const { return learned_.at(static_cast<std::size_t>(k)); }

    double weight(int i, int k) const { return w_.at(index(i, k)); }

    std::vector<double> column(int k) const {
        check_class(k);
        std::vector<double> col(static_cast<std::size_t>(n_av_));
        for (int i = 0; i < n_av_; ++i) col[static_cast<std::size_t>(i)] = w_[index(i, k)];
        return col;
    }

    std::vector<int> learned_classes() const {
        std::vector<int> out;
        for (int k = 0; k < classes_; ++k)
            if (learned_[static_cast<std::size_t>(k)]) out.push_back(k);
        return out;
    }

    void learn_class(int k, const std::vector<std::vector<double>>& patterns, bool allow_relearn = false) {
        check_class(k);
        if (learned_[static_cast<std::size_t>(k)] && !allow_relearn)
            throw validation_error("class " + std::to_string(k) + " is already learned");
        if (patterns.empty()) throw validation_error("learn_class needs at least one pattern");
        std::vector<double> mean(static_cast<std::size_t>(n_av_), 0.0);
        for (const auto& p: patterns) {
            if (p.size() != mean.size())
                throw validation_error("pattern length " + std::to_string(p.size()) + " does not match N_av " +
                                       std::to_string(n_av_));
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += p[i];
        }
        double norm2 = 0.0;
        for (auto& m: mean) {
            m /= static_cast<double>(patterns.size());
            norm2 += m * m;
        }
        const double norm = std::sqrt(norm2);
        if (!(norm > 0.0))
            throw zero_norm_error("class " + std::to_string(k) + ": mean AVI pattern is all zero");
        for (int i = 0; i < n_av_; ++i) w_[index(i, k)] = mean[static_cast<std::size_t>(i)] / norm;
        learned_[static_cast<std::size_t>(k)] = true;
    }

    double score(const std::vector<double>& pattern, int k) const {
        check_class(k);
        if (pattern.size() != static_cast<std::size_t>(n_av_))
            throw validation_error("pattern length does not match N_av");
        double s = 0.0;
        for (int i = 0; i < n_av_; ++i) s += w_[index(i, k)] * pattern[static_cast<std::size_t>(i)];
        return s;
    }

    // Argmax of the linear score over learned candidates; ties go to the
    // lowest class index.
    int predict(const std::vector<double>& pattern, const std::vector<int>& candidates) const {
        int best = -1;
        double best_score = 0.0;
        for (int k: candidates) {
            if (!learned(k)) continue;
            const double s = score(pattern, k);
            if (best < 0 || s > best_score || (s == best_score && k < best)) {
                best = k;
                best_score = s;
            }
        }
        if (best < 0) throw validation_error("no learned class among the prediction candidates");
        return best;
    }

    int predict(const std::vector<double>& pattern) const { return predict(pattern, learned_classes()); }

    // Text snapshot: "DEC1 <n_av> <classes>", a mask line, then one row per AVI neuron.
    void write(std::ostream& os) const {
        os << "DEC1 " << n_av_ << ' ' << classes_ << '\n';
        for (int k = 0; k < classes_; ++k) os << (k ? " " : "") << (learned_[static_cast<std::size_t>(k)] ? 1 : 0);
        os << '\n';
        for (int i = 0; i < n_av_; ++i) {
            for (int k = 0; k < classes_; ++k) os << (k ? " " : "") << detail::format_double(w_[index(i, k)]);
            os << '\n';
        }
    }

    static decoder read(std::istream& is) {
        std::string magic;
        int n_av = 0, classes = 0;
        if (!(is >> magic) || magic != "DEC1" || !(is >> n_av >> classes))
            throw malformed_header_error("decoder snapshot must start with DEC1 <n_av> <classes>");
        decoder d(n_av, classes);
        for (int k = 0; k < classes; ++k) {
            int m;
            if (!(is >> m) || (m != 0 && m != 1)) throw parse_error("bad learned mask");
            d.learned_[static_cast<std::size_t>(k)] = m == 1;
        }
        std::string tok;
        for (int i = 0; i < n_av; ++i)
            for (int k = 0; k < classes; ++k) {
                if (!(is >> tok)) throw row_length_error("decoder snapshot is truncated");
                d.w_[d.index(i, k)] = detail::parse_double(tok, static_cast<std::size_t>(i) + 3);
            }
        return d;
    }

    friend bool operator==(const decoder&, const decoder&) = default;

private:
    int n_av_ = 0;
    int classes_ = 0;
    std::vector<double> w_; // row-major N_av x C
    std::vector<bool> learned_;

    std::size_t index(int i, int k) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(classes_) + static_cast<std::size_t>(k);
    }

    void check_class(int k) const {
        if (k < 0 || k >= classes_) throw validation_error("class index " + std::to_string(k) + " out of range");
    }
};

} // namespace avim
