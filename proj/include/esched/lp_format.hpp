#ifndef ESCHED_LP_FORMAT_HPP
#define ESCHED_LP_FORMAT_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace esched::lp {

inline std::string num(double v) {
    if (v == static_cast<long long>(v) && std::fabs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Term {
    double coeff;
    std::string var;
};

struct Row {
    std::string name;
    std::vector<Term> terms;
    char sense;  // '<', '>', '='
    double rhs;
};

/// Minimal writer for the classic LP text format: a minimization objective,
/// named rows, bounds, and integrality sections.
class Writer {
public:
    void objective_term(double coeff, std::string var) {
        if (coeff != 0.0) objective_.push_back({coeff, std::move(var)});
    }
    Row& row(std::string name, char sense, double rhs) {
        rows_.push_back({std::move(name), {}, sense, rhs});
        return rows_.back();
    }
    void bound(std::string line) { bounds_.push_back(std::move(line)); }
    void binary(std::string var) { binaries_.push_back(std::move(var)); }
    void general(std::string var) { generals_.push_back(std::move(var)); }
    void comment(std::string text) { comments_.push_back(std::move(text)); }

    void write(std::ostream& os) const {
        for (const auto& c : comments_) os << "\\ " << c << "\n";
        os << "Minimize\n obj:";
        write_terms(os, objective_);
        os << "\nSubject To\n";
        for (const auto& r : rows_) {
            os << ' ' << r.name << ':';
            write_terms(os, r.terms);
            os << (r.sense == '<' ? " <= " : r.sense == '>' ? " >= " : " = ") << num(r.rhs) << "\n";
        }
        if (!bounds_.empty()) {
            os << "Bounds\n";
            for (const auto& b : bounds_) os << ' ' << b << "\n";
        }
        if (!binaries_.empty()) {
            os << "Binaries\n";
            for (const auto& v : binaries_) os << ' ' << v << "\n";
        }
        if (!generals_.empty()) {
            os << "Generals\n";
            for (const auto& v : generals_) os << ' ' << v << "\n";
        }
        os << "End\n";
    }

private:
    static void write_terms(std::ostream& os, const std::vector<Term>& terms) {
        if (terms.empty()) {
            os << " 0 zero";
            return;
        }
        for (const auto& t : terms) {
            if (t.coeff >= 0.0)
                os << " + " << num(t.coeff);
            else
                os << " - " << num(-t.coeff);
            os << ' ' << t.var;
        }
    }

    std::vector<Term> objective_;
    std::vector<Row> rows_;
    std::vector<std::string> bounds_;
    std::vector<std::string> binaries_;
    std::vector<std::string> generals_;
    std::vector<std::string> comments_;
};

}  // namespace esched::lp

#endif  // ESCHED_LP_FORMAT_HPP
