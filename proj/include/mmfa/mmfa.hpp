// SPDX-License-Identifier: Apache-2.0
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

/**
 * \file mmfa/mmfa.hpp
 *
 * \brief Umbrella header.
 */

#ifndef MMFA_MMFA_HPP
#define MMFA_MMFA_HPP

#include <mmfa/harness.hpp>
#include <mmfa/io.hpp>
#include <mmfa/matching.hpp>
#include <mmfa/model.hpp>
#include <mmfa/oracle.hpp>
#include <mmfa/power.hpp>
#include <mmfa/scenario.hpp>
#include <mmfa/selftest.hpp>
#include <mmfa/sumpower.hpp>
#include <mmfa/twostage.hpp>

#endif // MMFA_MMFA_HPP
