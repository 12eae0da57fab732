#include <cerrno>
#include <csignal>
#include <cstring>

#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "stguide/image_io.hpp"
#include "stguide/sim.hpp"

namespace stguide::sim {

namespace {

using json::Json;

constexpr int kReplyTimeoutMs = 30000;

[[noreturn]] void protocol_error(const std::string& role, const std::string& message) {
  throw Error(ErrorCode::kProtocol, role + " plug-in: " + message);
}

std::string step_name(const char* stem, int step, const char* ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04d", step);
  return stem + std::string(buf) + ext;
}

Json camera_json(const Camera& camera) {
  return Json{{"intrinsics", json::to_json(camera.k)},
              {"workspace_from_camera", json::to_json(camera.workspace_from_camera)}};
}

void shutdown(int& fd, int& pid) {
  if (fd >= 0) ::close(fd);
  fd = -1;
  if (pid <= 0) return;
  int status = 0;
  for (int i = 0; i < 100; ++i) {
    if (::waitpid(pid, &status, WNOHANG) != 0) {
      pid = -1;
      return;
    }
    ::usleep(10000);
  }
  ::kill(pid, SIGKILL);
  ::waitpid(pid, &status, 0);
  pid = -1;
}

}  // namespace

ExecChannel::ExecChannel(std::vector<std::string> argv, std::string role)
    : argv_(std::move(argv)), role_(std::move(role)) {
  if (argv_.empty()) throw Error(ErrorCode::kInvalidArgument, role_ + " plug-in: empty command");
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw Error(ErrorCode::kIo, "socketpair: " + std::string(std::strerror(errno)));
  }
  std::vector<char*> args;
  for (std::string& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw Error(ErrorCode::kIo, "fork: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(sv[1]);
  fd_ = sv[0];
  pid_ = pid;

  try {
    Json reply = request(Json{{"type", "hello"}, {"protocol", kProtocolVersion}, {"role", role_}});
    if (reply.value("type", "") != "hello" || reply.value("protocol", "") != kProtocolVersion) {
      protocol_error(role_, "bad handshake reply " + reply.dump());
    }
  } catch (...) {
    shutdown(fd_, pid_);
    throw;
  }
}

ExecChannel::~ExecChannel() { shutdown(fd_, pid_); }

Json ExecChannel::request(const Json& message) {
  send(message);
  Json reply = receive();
  if (!reply.is_object()) protocol_error(role_, "reply is not an object");
  if (reply.value("type", "") == "error") protocol_error(role_, reply.value("message", std::string("error")));
  return reply;
}

void ExecChannel::send(const Json& message) {
  const std::string line = message.dump() + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      protocol_error(role_, "write failed: " + std::string(std::strerror(errno)));
    }
    sent += static_cast<std::size_t>(n);
  }
}

Json ExecChannel::receive() {
  std::size_t newline;
  while ((newline = buffer_.find('\n')) == std::string::npos) {
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, kReplyTimeoutMs);
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) protocol_error(role_, "no reply");
    char chunk[4096];
    const ssize_t n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) protocol_error(role_, "channel closed");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string line = buffer_.substr(0, newline);
  buffer_.erase(0, newline + 1);
  try {
    return Json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    protocol_error(role_, "malformed reply");
  }
}

ExecPlanner::ExecPlanner(std::vector<std::string> argv, std::filesystem::path workdir)
    : channel_(std::move(argv), "planner"), workdir_(std::move(workdir)) {
  std::filesystem::create_directories(workdir_);
}

GuidancePackage ExecPlanner::plan(const PlannerRequest& request) {
  const auto rgb = workdir_ / step_name("plan_rgb", request.step, ".png");
  const auto depth = workdir_ / step_name("plan_depth", request.step, ".strf");
  io::write_rgb_png(rgb, request.observation.rgb);
  io::write_float_raster(depth, request.observation.depth);
  Json masks = Json::array();
  for (const InstanceMask& m : request.observation.masks) {
    const auto path = workdir_ / step_name(("plan_mask_" + m.id).c_str(), request.step, ".png");
    io::write_mask_png(path, m.mask);
    masks.push_back({{"id", m.id}, {"path", path.string()}});
  }
  Json reply = channel_.request(Json{{"type", "plan"},
                                     {"step", request.step},
                                     {"instruction", request.instruction},
                                     {"rgb", rgb.string()},
                                     {"depth", depth.string()},
                                     {"masks", masks},
                                     {"camera", camera_json(request.camera)},
                                     {"world", to_json(request.world)}});
  if (reply.value("type", "") != "guidance" || !reply.contains("guidance")) {
    throw Error(ErrorCode::kProtocol, "planner plug-in: expected a guidance reply");
  }
  try {
    return json::guidance_from_json(reply["guidance"]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kProtocol, std::string("planner plug-in: ") + e.what());
  }
}

ExecPolicy::ExecPolicy(std::vector<std::string> argv, std::filesystem::path workdir)
    : channel_(std::move(argv), "policy"), workdir_(std::move(workdir)) {
  std::filesystem::create_directories(workdir_);
}

Keypose ExecPolicy::act(const PolicyRequest& request) {
  if (!request.guidance) throw Error(ErrorCode::kNoGuidance, "policy request without guidance");
  const auto rgb = workdir_ / step_name("act_rgb", request.step, ".png");
  const auto depth = workdir_ / step_name("act_depth", request.step, ".strf");
  const auto weights = workdir_ / step_name("act_weights", request.step, ".strf");
  io::write_rgb_png(rgb, request.observation.rgb);
  io::write_float_raster(depth, request.observation.depth);
  io::write_float_raster(weights, request.observation.weights);
  Json reply = channel_.request(Json{{"type", "act"},
                                     {"step", request.step},
                                     {"sub_instruction", request.sub_instruction},
                                     {"rgb", rgb.string()},
                                     {"depth", depth.string()},
                                     {"weights", weights.string()},
                                     {"relevant_ids", request.observation.relevant_ids},
                                     {"guidance", json::to_json(*request.guidance)},
                                     {"state", to_json(request.state)}});
  if (reply.value("type", "") != "keypose" || !reply.contains("keypose")) {
    throw Error(ErrorCode::kProtocol, "policy plug-in: expected a keypose reply");
  }
  try {
    return keypose_from_json(reply["keypose"]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kProtocol, std::string("policy plug-in: ") + e.what());
  }
}

}  // namespace stguide::sim
