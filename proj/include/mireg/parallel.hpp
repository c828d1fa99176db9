// MIT License
//
// Copyright (c) 2026 The mireg authors.
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in all
// copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

#pragma once

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <cstddef>
#include <string>

namespace mireg {

enum class Execution { Serial, Parallel };

Execution parse_execution(const std::string &name);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
    return n == 0 ? 0 : (n + chunk_size - 1) / chunk_size;
}

// Calls fn(chunk_index, begin, end) for each fixed-size chunk of [0, n).
// Chunking depends only on n and chunk_size, never on the thread count, so
// per-chunk partials merged in chunk order give identical output on any
// machine. Serial runs the chunks in order on the calling thread.
template <typename Fn>
void for_each_chunk(std::size_t n, std::size_t chunk_size, Execution exec, const Fn &fn) {
    const std::size_t chunks = chunk_count(n, chunk_size);
    auto run = [&](std::size_t c) {
        const std::size_t begin = c * chunk_size;
        const std::size_t end = begin + chunk_size < n ? begin + chunk_size : n;
        fn(c, begin, end);
    };
    if (exec == Execution::Serial || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return;
    }
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, chunks, 1),
                      [&](const tbb::blocked_range<std::size_t> &r) {
                          for (std::size_t c = r.begin(); c != r.end(); ++c) run(c);
                      });
}

}  // namespace mireg
