//
// Copyright 2026 The gapanon Authors
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

#ifndef GAPANON_TESTS_TESTING_SYNTHETIC_H_
#define GAPANON_TESTS_TESTING_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "gapanon/corpus.h"
#include "gapanon/random.h"

namespace gapanon::testing {

// Capitalized pronounceable pseudo-word of 5 to 8 letters.
std::string PseudoName(Rng& rng);

// Documents of the form "<A> w w w <pronoun> w w <B> w w." whose label is a
// function of the pronoun surface alone: he/she -> A, him/her -> B,
// his/hers -> Neither. Candidate names are unique pseudo-words and carry no
// information about the label.
std::vector<GapExample> ContextTaskCorpus(size_t n, uint64_t seed);

// Randomized document with one or two word names, repeated and possessive
// mentions, punctuation and non-ASCII filler. Offsets are valid; the
// example may or may not qualify for anonymization.
GapExample RandomFixture(Rng& rng, int index);

}  // namespace gapanon::testing

#endif  // GAPANON_TESTS_TESTING_SYNTHETIC_H_
