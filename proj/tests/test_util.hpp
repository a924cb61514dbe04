#pragma once

#include <sys/wait.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path() / "adanorm_test_XXXXXX";
        std::string tmpl = base.string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

// Runs a command line, returns its exit status (-1 if it did not exit
// normally) and captures stdout+stderr.
struct CommandResult {
    int exit_code = -1;
    std::string output;
};

inline CommandResult run_command(const std::string& cmd) {
    CommandResult res;
    const std::string full = cmd + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, n);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    return res;
}

// Reference construction of the compensation sets, written against the
// stated semantics with an explicit eligibility pool: walk bad times in
// descending order, keep a shrinking window below the last assignment's
// minimum, physically remove consumed good times, and go inert once a window
// comes up empty. Used to cross-check the production implementation.
inline std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> compensation_oracle(
    std::vector<std::int64_t> good, std::vector<std::int64_t> bad, int n_comp) {
    std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> out;
    std::set<std::int64_t> pool(good.begin(), good.end());
    std::sort(bad.begin(), bad.end(), std::greater<>());
    std::optional<std::int64_t> barrier;
    bool inert = false;
    for (std::int64_t tb : bad) {
        std::vector<std::int64_t> take;
        if (n_comp > 0 && !inert) {
            const std::int64_t upper = barrier ? std::min(tb, *barrier) : tb;
            std::vector<std::int64_t> eligible(pool.begin(), pool.lower_bound(upper));
            const std::size_t k =
                std::min<std::size_t>(static_cast<std::size_t>(n_comp), eligible.size());
            take.assign(eligible.end() - static_cast<std::ptrdiff_t>(k), eligible.end());
            if (take.empty()) {
                inert = true;
            } else {
                barrier = take.front();
                for (std::int64_t x : take) pool.erase(x);
            }
        }
        out.emplace_back(tb, std::move(take));
    }
    return out;
}

}  // namespace testutil
