#include "ellipcenter/problem_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ellipcenter {

namespace {

std::string format_parse_error(const std::string& source, std::size_t line, const std::string& message) {
    std::ostringstream os;
    os << source << ':' << line << ": " << message;
    return os.str();
}

struct Token {
    std::string text;
    std::size_t line = 0;
};

class TokenStream {
public:
    TokenStream(std::istream& in, std::string source) : source_(std::move(source)) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens_.push_back({tok, lineno});
        }
        last_line_ = lineno;
    }

    bool done() const { return pos_ >= tokens_.size(); }
    const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }
    const Token& next(const char* expecting) {
        if (done()) fail(last_line_, std::string("unexpected end of input, expected ") + expecting);
        return tokens_[pos_++];
    }
    std::size_t line() const { return done() ? last_line_ : tokens_[pos_].line; }

    [[noreturn]] void fail(std::size_t line, const std::string& message) const {
        throw ParseError(source_, line, message);
    }

    double number(const char* what) {
        const Token& t = next(what);
        double v = 0.0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) fail(t.line, "expected " + std::string(what) + ", got '" + t.text + "'");
        return v;
    }

    std::size_t count(const char* what) {
        const Token& t = next(what);
        std::size_t v = 0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || v == 0) {
            fail(t.line, "expected positive integer " + std::string(what) + ", got '" + t.text + "'");
        }
        return v;
    }

    /// Reads exactly `expected` numbers of a section, stopping early at keywords.
    Vector entries(std::size_t expected, const char* section) {
        Vector out;
        out.reserve(expected);
        const std::size_t start_line = line();
        while (out.size() < expected) {
            const Token* t = peek();
            if (t == nullptr || t->text == "b" || t->text == "c") {
                std::ostringstream os;
                os << section << " section: expected " << expected << " entries, found " << out.size();
                fail(t ? t->line : start_line, os.str());
            }
            out.push_back(number(section));
        }
        return out;
    }

private:
    std::string source_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t last_line_ = 0;
};

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : Error(format_parse_error(source, line, message)), line_(line) {}

QuadraticProblem parse_problem(std::istream& in, const std::string& source) {
    TokenStream ts(in, source);
    if (ts.done()) ts.fail(1, "empty problem file");
    const Token header = ts.next("header");
    const std::size_t n = ts.count("dimension n");

    std::optional<LinearOperator> op;
    try {
        if (header.text == "diag") {
            Vector d = ts.entries(n, "diagonal");
            for (std::size_t i = 0; i < n; ++i) {
                if (!(d[i] > 0.0)) {
                    std::ostringstream os;
                    os << "diagonal entry " << i << " must be positive, got " << d[i];
                    ts.fail(header.line, os.str());
                }
            }
            op = LinearOperator::diagonal(std::move(d));
        } else if (header.text == "dense") {
            op = LinearOperator::dense(n, ts.entries(n * n, "dense matrix"));
        } else if (header.text == "rank1") {
            const double sigma = ts.number("sigma");
            op = LinearOperator::rank_one_plus_identity(ts.entries(n, "rank-one vector v"), sigma);
        } else {
            ts.fail(header.line, "malformed header: expected 'diag', 'dense' or 'rank1', got '" + header.text + "'");
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        ts.fail(header.line, e.what());
    }

    const Token* b_tok = ts.peek();
    if (b_tok == nullptr || b_tok->text != "b") {
        ts.fail(ts.line(), b_tok == nullptr ? "missing 'b' section" : "missing 'b' section (found '" + b_tok->text + "')");
    }
    ts.next("b");
    Vector b = ts.entries(n, "b");

    double c = 0.0;
    if (const Token* t = ts.peek(); t != nullptr) {
        if (t->text != "c") ts.fail(t->line, "unexpected token '" + t->text + "' after b section");
        ts.next("c");
        c = ts.number("c value");
    }
    if (!ts.done()) ts.fail(ts.line(), "trailing data after c");
    return QuadraticProblem(std::move(*op), std::move(b), c);
}

QuadraticProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file: " + path);
    return parse_problem(in, path);
}

void write_problem(std::ostream& out, const QuadraticProblem& p) {
    const auto old_precision = out.precision(17);
    const std::size_t n = p.dim();
    auto write_row = [&](std::span<const double> v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
        out << '\n';
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DenseMatrix>) {
                out << "dense " << n << '\n';
                for (std::size_t i = 0; i < n; ++i) write_row(std::span(s.entries).subspan(i * n, n));
            } else if constexpr (std::is_same_v<T, DiagonalMatrix>) {
                out << "diag " << n << '\n';
                write_row(s.diag);
            } else {
                out << "rank1 " << n << ' ' << s.sigma << '\n';
                write_row(s.v);
            }
        },
        p.op().storage());
    out << "b\n";
    write_row(p.b());
    if (p.c() != 0.0) out << "c " << p.c() << '\n';
    out.precision(old_precision);
}

void save_problem(const std::string& path, const QuadraticProblem& p) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write problem file: " + path);
    write_problem(out, p);
}

}  // namespace ellipcenter
