#pragma once

// (Z/2)^r-actions on rational double points: the classification table, the
// six involution normal forms and exact equivariance checks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tequiv {

/// Sparse integer polynomial over named variables.
struct PolySparse {
    std::vector<std::string> vars;
    std::map<std::vector<int>, std::int64_t> terms;

    PolySparse() = default;
    explicit PolySparse(std::vector<std::string> v) : vars(std::move(v)) {}

    /// Adds coeff * prod vars[i]^exps[i]; zero results are dropped.
    PolySparse& add(std::int64_t coeff, std::vector<int> exps);
    PolySparse operator-() const;
    friend bool operator==(const PolySparse&, const PolySparse&) = default;
    std::string to_string() const;
};

/// p -> (s_i * p_{perm[i]})_i; acts on polynomials by substituting
/// var_i := s_i * var_{perm[i]}.
struct SignedMonomialMap {
    std::string name;
    std::vector<std::string> vars;
    std::vector<int> perm;
    std::vector<int> sign;

    static SignedMonomialMap diagonal(std::string name, std::vector<std::string> vars, std::vector<int> sign);
    static SignedMonomialMap identity(std::vector<std::string> vars);

    /// (this o other)(p) = this(other(p)).
    SignedMonomialMap compose(const SignedMonomialMap& other) const;
    /// Same map with extra variables fixed.
    SignedMonomialMap extended(const std::vector<std::string>& extra) const;
    bool is_identity() const;
    bool is_diagonal() const;
    /// Dimension of the fixed subspace.
    int fixed_dimension() const;
    /// A spanning vector of the fixed subspace when it is a line.
    std::optional<std::vector<std::int64_t>> fixed_line() const;

    friend bool operator==(const SignedMonomialMap& x, const SignedMonomialMap& y) {
        return x.vars == y.vars && x.perm == y.perm && x.sign == y.sign;
    }
};

enum class Coords { xyz, uvy };
std::string to_string(Coords c);

/// The normal form of involution `form` ('a'..'f') in the given coordinates,
/// with u = z + ix, v = z - ix. Form c has no monomial expression in (x,y,z).
std::optional<SignedMonomialMap> involution_form(char form, Coords c);

/// Equation of the RDP of the given type ("A", "D", "E") and index.
/// A is available in both coordinate systems, D and E only in (x,y,z).
std::optional<PolySparse> rdp_equation(const std::string& type, int index, Coords c);

/// Substitution; throws InvalidArgument when the map misses a variable of f.
PolySparse act(const SignedMonomialMap& m, const PolySparse& f);

enum class Invariance { invariant, anti_invariant, neither };
std::string to_string(Invariance i);
Invariance is_invariant(const SignedMonomialMap& m, const PolySparse& f);

/// Same verdict read off the monomial weights of a diagonal sign map.
Invariance sign_weight_invariance(const SignedMonomialMap& m, const PolySparse& f);

/// Every monomial has weight sum(e_i w_i) = 0 mod modulus.
bool weights_invariant(const std::vector<std::int64_t>& weights, std::int64_t modulus, const PolySparse& f);

/// The fixed locus of m meets {f = 0} in a curve.
bool has_divisorial_fixed_locus(const SignedMonomialMap& m, const PolySparse& f);

struct FamilyRef {
    std::string label;
    /// "A", "D", "E", "B", "Y" or "all".
    std::string type;
    int mult = 0;
    int add = 0;
    int index(int n) const { return mult * n + add; }
};

/// One row of the table restricted to one (X, Y) pairing.
struct ActionRecord {
    int id = 0;
    /// Position of the pairing within its row.
    int variant = 0;
    int r = 0;
    FamilyRef X;
    FamilyRef Y;
    int n_min = 0;
    std::optional<std::string> constraint;
    std::vector<char> basis_forms;
    int I_x_size = 0;
    bool simple = false;
    bool smoothable = false;
    bool almost_simple = true;
    std::vector<std::string> flags;
    /// Whether index n is admissible for this pairing.
    bool admits(int n) const;
};

/// The bundled table, expanded to one record per (X, Y) pairing.
const std::vector<ActionRecord>& table();
/// Parses the table from a JSON document (same schema as the bundled file).
std::vector<ActionRecord> parse_table(const std::string& json_text);
/// Text of the bundled data file.
const std::string& bundled_table_json();

struct CheckLine {
    int row = 0;
    std::string check;
    bool passed = true;
    std::string detail;
};

struct ConsistencyReport {
    std::vector<CheckLine> lines;
    std::vector<int> simple_rows;
    std::vector<int> non_smoothable_rows;
    bool passed() const;
};

/// Validates the table against computation: involutions, column
/// implications, equivariance of every equation under every listed form,
/// |I_x| from the fixed loci, quotient families against the cyclic data,
/// the smoothing family of A_{2n} and the mu_n weights of the class T
/// smoothing family. Checks run for n in [n_min, n_min + span).
ConsistencyReport consistency_check(const std::vector<ActionRecord>& records = table(), int span = 8);

}  // namespace tequiv
