// Copyright 2026 The bincz Authors
//
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

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bincz {

using WarningHandler = std::function<void(const std::string&)>;

/// Routes a non-fatal warning (truncation risk, rank deficiency, ...) to the
/// installed handler. The default handler prints to stderr.
void warn(const std::string& message);

/// Installs `handler` and returns the previous one. Not meant to be swapped
/// while other threads emit warnings.
WarningHandler set_warning_handler(WarningHandler handler);

/// Collects warnings for the lifetime of the object; restores the previous
/// handler on destruction.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace bincz
