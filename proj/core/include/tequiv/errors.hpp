#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tequiv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: mismatched ranks or lattice sizes, violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration was requested above the configured rank cap.
class RankCapExceeded : public Error {
public:
    RankCapExceeded(int rank, int cap)
        : Error("rank " + std::to_string(rank) + " exceeds the exhaustive enumeration cap " +
                std::to_string(cap)),
          rank_(rank),
          cap_(cap) {}
    int rank() const noexcept { return rank_; }
    int cap() const noexcept { return cap_; }

private:
    int rank_;
    int cap_;
};

/// A bounded search (q escalation, multiplier escalation, lattice search box) ran out of budget.
class SearchCapExceeded : public Error {
public:
    using Error::Error;
};

/// An internal cross-check between two independent computations disagreed.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// A sum of branch classes that must be halved in the lattice has odd coordinates.
class ParityError : public Error {
public:
    ParityError(int character_index, std::string character_bits, std::vector<std::string> odd_coordinates)
        : Error(make_message(character_index, character_bits, odd_coordinates)),
          character_index_(character_index),
          character_bits_(std::move(character_bits)),
          odd_coordinates_(std::move(odd_coordinates)) {}

    int character_index() const noexcept { return character_index_; }
    const std::string& character_bits() const noexcept { return character_bits_; }
    /// Coordinate names ("r", "s", "a3", ...) whose value is odd.
    const std::vector<std::string>& odd_coordinates() const noexcept { return odd_coordinates_; }

private:
    static std::string make_message(int idx, const std::string& bits, const std::vector<std::string>& odd) {
        std::string m = "branch sum for basis character #" + std::to_string(idx) + " (" + bits +
                        ") is not divisible by 2; odd coordinates:";
        for (const auto& c : odd) m += " " + c;
        return m;
    }

    int character_index_;
    std::string character_bits_;
    std::vector<std::string> odd_coordinates_;
};

}  // namespace tequiv
