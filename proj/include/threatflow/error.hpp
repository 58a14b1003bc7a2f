/*
 * Copyright (c) 2026, The threatflow authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef THREATFLOW_ERROR_HPP_
#define THREATFLOW_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace threatflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Domain failures. The CLI maps these to exit code 1.
class TypeMismatch : public Error { using Error::Error; };
class EvalError : public Error { using Error::Error; };
class UnknownTransition : public Error { using Error::Error; };
class NotEnabled : public Error { using Error::Error; };
class InvalidNet : public Error { using Error::Error; };
class InvalidConfig : public Error { using Error::Error; };
class InvalidThreat : public Error { using Error::Error; };
class UnresolvedLink : public Error { using Error::Error; };
class UnknownId : public Error { using Error::Error; };
class UnknownPlace : public Error { using Error::Error; };
class UnknownToggle : public Error { using Error::Error; };

// Input failures. The CLI maps these to exit code 2.
class IoError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };

}  // namespace threatflow

#endif  // THREATFLOW_ERROR_HPP_
