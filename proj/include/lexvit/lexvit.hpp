#pragma once

#include "lexvit/automaton.hpp"
#include "lexvit/bench.hpp"
#include "lexvit/corpus.hpp"
#include "lexvit/decoder.hpp"
#include "lexvit/errors.hpp"
#include "lexvit/letter_hmm.hpp"
#include "lexvit/lexicon.hpp"
#include "lexvit/lexicon_hmm.hpp"
#include "lexvit/oracle.hpp"
#include "lexvit/pph.hpp"
#include "lexvit/score.hpp"
#include "lexvit/serialize.hpp"
#include "lexvit/synth.hpp"
#include "lexvit/utf8.hpp"
#include "lexvit/verify.hpp"
