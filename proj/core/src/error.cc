//
// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpsynth/error.h"

namespace dpsynth {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kCapacity:
      return "capacity exceeded";
    case ErrorCode::kIo:
      return "i/o error";
    case ErrorCode::kDomainMismatch:
      return "domain mismatch";
    case ErrorCode::kNumerical:
      return "numerical failure";
  }
  return "unknown";
}

}  // namespace dpsynth
