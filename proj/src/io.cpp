#include "ecokg/io.hpp"

#include <fstream>
#include <system_error>
#include <unistd.h>

#include "ecokg/errors.hpp"

namespace ecokg {

void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill, bool binary) {
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!out) throw InputError(path.string() + ": cannot write file");
        fill(out);
        out.flush();
        if (!out) throw InputError(path.string() + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw InputError(path.string() + ": cannot replace file");
    }
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    write_atomic(path, [&](std::ostream& out) { out << content; }, true);
}

}  // namespace ecokg
