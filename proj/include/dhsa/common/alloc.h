/*
 * Copyright 2026 The DHSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef DHSA_COMMON_ALLOC_H_
#define DHSA_COMMON_ALLOC_H_

namespace dhsa {

// Keeps freed multi-megabyte message buffers in the heap instead of
// returning them to the OS.
void RetainFreedMemory();

}  // namespace dhsa

#endif  // DHSA_COMMON_ALLOC_H_
