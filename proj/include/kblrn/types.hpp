#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace kblrn {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// Dense index into an interned vocabulary. The tag keeps entity, relation and
// numeric-feature ids from mixing.
template <typename Tag>
struct Id {
    std::uint32_t value = 0;

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}
    constexpr std::size_t index() const { return value; }
    constexpr auto operator<=>(const Id&) const = default;
};

using EntityId = Id<struct EntityTag>;
using RelationId = Id<struct RelationTag>;
using FeatureId = Id<struct FeatureTag>;

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    constexpr auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t x = (std::uint64_t{t.head.value} << 32) ^ t.tail.value;
        x ^= std::uint64_t{t.relation.value} * 0x9e3779b97f4a7c15ULL;
        x ^= x >> 29;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 32;
        return static_cast<std::size_t>(x);
    }
};

// Malformed input file. `line` is 1-based; 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
   public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

   private:
    std::size_t line_;
};

// Inputs that parse but are inconsistent (unknown labels, mismatched shapes, ...).
class DataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bijection between string labels and dense ids 0..size()-1.
template <typename IdT>
class Vocabulary {
   public:
    IdT intern(std::string_view label) {
        auto it = index_.find(std::string(label));
        if (it != index_.end()) return it->second;
        IdT id{static_cast<std::uint32_t>(labels_.size())};
        labels_.emplace_back(label);
        index_.emplace(labels_.back(), id);
        return id;
    }

    std::optional<IdT> find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    IdT at(std::string_view label) const {
        auto id = find(label);
        if (!id) throw DataError("unknown label '" + std::string(label) + "'");
        return *id;
    }

    const std::string& label(IdT id) const { return labels_.at(id.index()); }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    bool contains(IdT id) const { return id.index() < labels_.size(); }

    bool operator==(const Vocabulary& other) const { return labels_ == other.labels_; }

   private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, IdT> index_;
};

}  // namespace kblrn
