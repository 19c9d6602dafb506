#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "kblrn/kb_store.hpp"
#include "kblrn/text_io.hpp"

namespace kblrn::test {

using LabelTriple = std::tuple<std::string, std::string, std::string>;

inline std::string tsv(std::initializer_list<LabelTriple> rows) {
    std::string out;
    for (const auto& [h, r, t] : rows) out += h + "\t" + r + "\t" + t + "\n";
    return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
   public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("kblrn-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& contents) const {
        auto p = path_ / name;
        write_file(p, contents);
        return p;
    }

   private:
    std::filesystem::path path_;
};

// Store over entities "e0".."e{n-1}" and relations "r0".."r{m-1}" (all interned
// up front so ids equal the numeric suffix).
inline TripleStore make_store(std::size_t entities, std::size_t relations, std::vector<Triple> train,
                              std::vector<Triple> valid = {}, std::vector<Triple> test = {}) {
    Vocabulary<EntityId> ev;
    Vocabulary<RelationId> rv;
    for (std::size_t i = 0; i < entities; ++i) ev.intern("e" + std::to_string(i));
    for (std::size_t i = 0; i < relations; ++i) rv.intern("r" + std::to_string(i));
    return TripleStore(std::move(ev), std::move(rv), {std::move(train), std::move(valid), std::move(test)});
}

inline Triple T(std::uint32_t h, std::uint32_t r, std::uint32_t t) {
    return Triple{EntityId{h}, RelationId{r}, EntityId{t}};
}

// Random triples over the given vocabulary sizes (duplicates possible).
inline std::vector<Triple> random_triples(std::mt19937_64& rng, std::size_t count, std::size_t entities,
                                          std::size_t relations) {
    std::uniform_int_distribution<std::uint32_t> e(0, static_cast<std::uint32_t>(entities - 1));
    std::uniform_int_distribution<std::uint32_t> r(0, static_cast<std::uint32_t>(relations - 1));
    std::vector<Triple> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(T(e(rng), r(rng), e(rng)));
    return out;
}

}  // namespace kblrn::test
