#include "irrlab/harness/template.hpp"

#include <fstream>
#include <random>

namespace irrlab::harness {

std::vector<char> load_template(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw TemplateError("cannot open template " + path.string());
    }
    std::vector<char> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line != "a" && line != "d") {
            throw TemplateError(path.string() + ":" + std::to_string(n) + ": expected 'a' or 'd', got '" + line + "'",
                                n);
        }
        out.push_back(line[0]);
    }
    if (out.empty()) {
        throw TemplateError(path.string() + ": template contains no interactions");
    }
    return out;
}

std::vector<char> generate_interactions(std::size_t count, std::uint64_t seed)
{
    if (count == 0) {
        throw std::invalid_argument("template interaction count must be > 0");
    }
    // mt19937_64 output is fixed by the standard; distributions are not, so
    // take the top bit directly to stay identical across standard libraries.
    std::mt19937_64 rng(seed);
    std::vector<char> out(count);
    for (auto& c : out) {
        c = (rng() >> 63) ? 'd' : 'a';
    }
    return out;
}

void write_template(const std::filesystem::path& path, const std::vector<char>& interactions)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (char c : interactions) {
        out << c << '\n';
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("cannot write template " + path.string());
    }
}

void generate_template(const std::filesystem::path& path, std::size_t count, std::uint64_t seed)
{
    write_template(path, generate_interactions(count, seed));
}

} // namespace irrlab::harness
