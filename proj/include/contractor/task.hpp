#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace contractor {

enum class TaskStatus { Todo, Done, Error, Verified };

inline const char* to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Todo: return "TODO";
    case TaskStatus::Done: return "DONE";
    case TaskStatus::Error: return "ERROR";
    case TaskStatus::Verified: return "VERIFIED";
  }
  return "?";
}

inline std::optional<TaskStatus> parse_status(std::string_view s) {
  std::string up;
  for (char c : s) up += static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c);
  if (up == "TODO") return TaskStatus::Todo;
  if (up == "DONE") return TaskStatus::Done;
  if (up == "ERROR") return TaskStatus::Error;
  if (up == "VERIFIED") return TaskStatus::Verified;
  return std::nullopt;
}

// TODO->DONE, DONE->VERIFIED, DONE->ERROR, ERROR->DONE. VERIFIED is absorbing.
inline bool is_legal_transition(TaskStatus from, TaskStatus to) {
  using S = TaskStatus;
  return (from == S::Todo && to == S::Done) || (from == S::Done && to == S::Verified) ||
         (from == S::Done && to == S::Error) || (from == S::Error && to == S::Done);
}

struct Task {
  std::string id;  // module id, equal to the normalized file path
  std::string file_path;
  std::string owner;
  TaskStatus status = TaskStatus::Todo;
  int attempts = 0;  // worker dispatches so far
  std::vector<std::string> feedback;

  bool operator==(const Task&) const = default;
};

}  // namespace contractor
