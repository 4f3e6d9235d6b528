#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>

#include "factgraph/error.hpp"
#include "factgraph/store/codec.hpp"
#include "factgraph/store/model.hpp"

namespace factgraph::store {

enum class SyncMode {
  /// write(2) only: survives a killed process, not a power cut.
  write,
  /// write(2) then fdatasync(2) before returning.
  fdatasync,
};

/// Append-only JSONL writer. Each append is a single write of one complete
/// line, so a crash leaves at most a torn final line.
class EventLog {
 public:
  EventLog(const std::filesystem::path& path, SyncMode sync) : path_(path), sync_(sync) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error(ErrorCode::io_error,
                  "cannot open event log '" + path.string() + "': " + std::strerror(errno), "store");
    }
  }

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  ~EventLog() {
    if (fd_ >= 0) {
      ::fsync(fd_);
      ::close(fd_);
    }
  }

  void append(const Event& ev) { append_line(event_to_json(ev).dump()); }

  void append_line(std::string line) {
    line += '\n';
    std::string_view rest = line;
    while (!rest.empty()) {
      ssize_t n = ::write(fd_, rest.data(), rest.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::io_error, "event log write failed: " + std::string(std::strerror(errno)));
      }
      rest.remove_prefix(static_cast<std::size_t>(n));
    }
    if (sync_ == SyncMode::fdatasync && ::fdatasync(fd_) != 0) {
      throw Error(ErrorCode::io_error, "event log sync failed: " + std::string(std::strerror(errno)));
    }
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  SyncMode sync_;
  int fd_ = -1;
};

/// Rebuilds a state from a JSONL event stream. Any line that fails to parse
/// or to apply is reported as corrupt_event with its 1-based line number.
inline StoreState replay(std::istream& in) {
  StoreState state;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      json j = json::parse(line);
      state.apply(event_from_json(j));
    } catch (const json::exception& e) {
      throw LineError(ErrorCode::corrupt_event, line_no, std::string("unparseable event: ") + e.what());
    } catch (const Error& e) {
      throw LineError(ErrorCode::corrupt_event, line_no, std::string(to_string(e.code())) + ": " + e.what());
    }
  }
  return state;
}

/// Replays the log at `path`; a missing file is an empty store.
inline StoreState replay_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read event log '" + path.string() + "'", "store");
  return replay(in);
}

}  // namespace factgraph::store
