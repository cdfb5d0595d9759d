#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace irrlab::harness {

class TemplateError : public std::runtime_error {
public:
    TemplateError(const std::string& what, std::size_t line = 0) : std::runtime_error(what), line_(line) {}

    /// 1-based offending line, 0 when the error is not tied to a line.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads an interaction template: one 'a' or 'd' per line, in order.
/// Trailing '\r' and a final newline are tolerated; blank lines are not.
std::vector<char> load_template(const std::filesystem::path& path);

/// Deterministic pseudorandom a/d sequence.
std::vector<char> generate_interactions(std::size_t count, std::uint64_t seed);

/// Writes generate_interactions(count, seed) to `path`, one per line.
void generate_template(const std::filesystem::path& path, std::size_t count, std::uint64_t seed);

void write_template(const std::filesystem::path& path, const std::vector<char>& interactions);

} // namespace irrlab::harness
