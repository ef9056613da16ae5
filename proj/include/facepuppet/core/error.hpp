/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/core/error.hpp
 *
 * Copyright 2026 The facepuppet authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef FACEPUPPET_CORE_ERROR_HPP
#define FACEPUPPET_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace facepuppet {

/**
 * Base class of all errors thrown by the library.
 */
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/**
 * Malformed input: bad files, violated preconditions, dimension mismatches.
 * The CLI maps these to exit code 2.
 */
class InputError : public Error
{
public:
    using Error::Error;
};

/**
 * A numerical procedure failed on otherwise valid input (singular system,
 * non-convergence). The CLI maps these to exit code 1.
 */
class ComputationError : public Error
{
public:
    using Error::Error;
};

} /* namespace facepuppet */

#endif /* FACEPUPPET_CORE_ERROR_HPP */
