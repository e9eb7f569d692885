// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "caslite/file_util.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "caslite/error.hpp"

namespace caslite {

namespace {

Error io_error(const std::string& what, const std::filesystem::path& path) {
  return Error(ErrorCode::Io, what + " '" + path.string() + "': " + std::strerror(errno));
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }

 private:
  int fd_;
};

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("cannot read", path);
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents, unsigned mode,
                       const std::function<void()>& before_rename) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, mode));
    if (fd.get() < 0) throw io_error("cannot create", tmp);
    // open() honours the umask; the requested mode is part of the contract.
    if (::fchmod(fd.get(), mode) != 0) throw io_error("cannot chmod", tmp);
    std::size_t off = 0;
    while (off < contents.size()) {
      ssize_t n = ::write(fd.get(), contents.data() + off, contents.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw io_error("cannot write", tmp);
      }
      off += static_cast<std::size_t>(n);
    }
    if (::fsync(fd.get()) != 0) throw io_error("cannot fsync", tmp);
    if (::close(fd.release()) != 0) throw io_error("cannot close", tmp);
  }
  if (before_rename) before_rename();
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    int saved = errno;
    ::unlink(tmp.c_str());
    errno = saved;
    throw io_error("cannot rename into", path);
  }
  std::filesystem::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  Fd dfd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (dfd.get() >= 0) ::fsync(dfd.get());
}

}  // namespace caslite
