#pragma once

#include "cayley/sigma_finite.hpp"

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cayley {

/// Malformed input, with 1-based position and the tokens that would have been accepted.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t line, std::size_t column, std::vector<std::string> expected, const std::string& found);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::vector<std::string> expected_;
};

/// Well-formed input that does not describe a valid object.
class SemanticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- events ------------------------------------------------------------------

struct EventExpr {
    enum class Kind { All, None, Equals, In, NotIn, Not, And, Or };
    Kind kind = Kind::All;
    VertexIndex vertex = 0;    // Equals, In, NotIn
    std::vector<Spin> values;  // sorted, duplicate free
    std::vector<EventExpr> children;

    friend bool operator==(const EventExpr&, const EventExpr&) = default;
};

EventExpr parse_event(std::string_view text);
std::string print_event(const EventExpr& e);
/// Throws SemanticError for spins outside the alphabet or vertices past max depth.
CylinderSet lower(const EventExpr& e, const CylinderField& field);

// ---- spec documents ------------------------------------------------------------

enum class FamilyType { Markov, MarkovProb, Product, Table, Random };

std::string to_string(FamilyType t);

struct FamilySpec {
    FamilyType type = FamilyType::Markov;
    WeightSequence root;       // Markov
    TransitionKernel kernel;   // Markov
    WeightSequence weights;    // Product
    Depth depth = 0;           // Table, Random
    std::vector<Rational> table;  // Table, little-endian atom order
    std::uint64_t seed = 0;    // Random
    Rational scale{1};

    friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

struct CoverSpec {
    enum class Kind { RootSlices, RootBlocks, Atoms, Whole, List };
    std::string name;
    Kind kind = Kind::Whole;
    std::uint64_t parameter = 0;     // block size or depth
    std::vector<EventExpr> events;   // List

    friend bool operator==(const CoverSpec&, const CoverSpec&) = default;
};

struct SpecDocument {
    unsigned order = 2;
    Depth max_depth = 16;
    SpinSet spins = SpinSet::finite(2);
    FamilySpec family;
    std::vector<CoverSpec> covers;

    friend bool operator==(const SpecDocument&, const SpecDocument&) = default;
};

SpecDocument parse_spec(std::string_view text);
/// Canonical text; parse_spec(print_spec(d)) == d.
std::string print_spec(const SpecDocument& d);

/// Cover descriptors shared by specs and the command line:
/// root-slices | root-blocks(b) | atoms(n) | whole | list: ev ; ev ...
CoverSpec parse_cover(std::string_view name, std::string_view text);
std::string print_cover(const CoverSpec& c);

CylinderField make_field(const SpecDocument& d);
MeasureFamily make_family(const SpecDocument& d, const CylinderField& field);
Cover make_cover(const CoverSpec& c, const CylinderField& field);

/// Command-line front end; returns the process exit code:
/// 0 computed or PASS, 1 verified violation, 2 usage or parse error, 3 inconclusive.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cayley
