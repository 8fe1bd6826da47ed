#!/usr/bin/env python3
# Copyright 2026 The tokenlink Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the checked-in fixture corpus and entropy-model weights.

The C++ test suite never runs this script; it only reads its outputs under
fixtures/. Rerunning it with the same seed and the same torch build
reproduces the corpus byte-for-byte; the weights depend on torch numerics.

Synthetic corpus: an 8x8 grid of image tokens (vocabulary 16) and an 8-token
prompt (vocabulary 32). Prompt token j names the dominant "colour" of image
row j, so the prompt genuinely predicts the image.
"""

import argparse
import math
import os
import struct
import time

import numpy as np
import torch
import torch.nn.functional as F

D_MODEL = 64
N_LAYERS = 2
N_HEADS = 4
MAX_CONTEXT = 1152
IMAGE_VOCAB = 16
TEXT_VOCAB = 32
ROWS = 8
COLS = 8
SEQ_LEN = ROWS * COLS

MODES = {"ar": 0, "masked": 1, "textcond": 2}


# ---------------------------------------------------------------- corpus


def generate_corpus(rng, count, p_same=0.8, p_next=0.1):
    texts = np.zeros((count, ROWS), dtype=np.int64)
    images = np.zeros((count, SEQ_LEN), dtype=np.int64)
    for n in range(count):
        colours = rng.randint(0, IMAGE_VOCAB, size=ROWS)
        # One colour word per row; each colour has two synonyms (c, c + 16).
        texts[n] = colours + (rng.randint(0, 2, size=ROWS) * 16)
        for r in range(ROWS):
            for c in range(COLS):
                x = rng.random_sample()
                if x < p_same:
                    tok = colours[r]
                elif x < p_same + p_next:
                    tok = (colours[r] + 1) % IMAGE_VOCAB
                else:
                    tok = rng.randint(0, IMAGE_VOCAB)
                images[n, r * COLS + c] = tok
    return texts, images


def leb128(value):
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def umtk_record(vocab_size, ids):
    body = b"".join(leb128(int(i)) for i in ids)
    return b"UMTK" + struct.pack("<II", vocab_size, len(ids)) + body


def write_umtk_records(path, vocab_size, rows):
    with open(path, "wb") as f:
        for row in rows:
            f.write(umtk_record(vocab_size, row))


# ---------------------------------------------------------------- model


class _NamedParams(dict):
    """Dotted-name parameter table registered on the owning module."""

    def __init__(self, owner):
        super().__init__()
        self._owner = owner

    def __setitem__(self, name, param):
        self._owner.register_parameter(name.replace(".", "__"), param)
        super().__setitem__(name, param)


class TinyTransformer(torch.nn.Module):
    """Mirrors the C++ reference forward pass: pre-LN, causal MHA, ReLU MLP.

    Linear weights are stored (in, out) so that exported tensors need no
    transposition.
    """

    def __init__(self, mode, gen):
        super().__init__()
        self.mode = mode
        d = D_MODEL

        def p(*shape, scale):
            return torch.nn.Parameter(
                torch.randn(*shape, generator=gen, dtype=torch.float32) * scale)

        def zeros(*shape):
            return torch.nn.Parameter(torch.zeros(*shape))

        def ones(*shape):
            return torch.nn.Parameter(torch.ones(*shape))

        rows = IMAGE_VOCAB + (1 if mode == "masked" else 0)
        self.params = _NamedParams(self)
        self.params["embed.image"] = p(rows, d, scale=0.1)
        if mode == "textcond":
            self.params["embed.text"] = p(TEXT_VOCAB, d, scale=0.1)
        self.params["embed.boi"] = p(1, d, scale=0.1)
        self.params["embed.position"] = p(MAX_CONTEXT, d, scale=0.02)
        for l in range(N_LAYERS):
            pre = f"layers.{l}."
            self.params[pre + "ln1.gain"] = ones(d)
            self.params[pre + "ln1.bias"] = zeros(d)
            for name in ("query", "key", "value", "output"):
                self.params[pre + f"attn.{name}.weight"] = p(d, d, scale=d ** -0.5)
                self.params[pre + f"attn.{name}.bias"] = zeros(d)
            self.params[pre + "ln2.gain"] = ones(d)
            self.params[pre + "ln2.bias"] = zeros(d)
            self.params[pre + "ffn.up.weight"] = p(d, 4 * d, scale=d ** -0.5)
            self.params[pre + "ffn.up.bias"] = zeros(4 * d)
            self.params[pre + "ffn.down.weight"] = p(4 * d, d, scale=(4 * d) ** -0.5)
            self.params[pre + "ffn.down.bias"] = zeros(d)
        self.params["final_ln.gain"] = ones(d)
        self.params["final_ln.bias"] = zeros(d)
        self.params["head.weight"] = p(d, IMAGE_VOCAB, scale=d ** -0.5)
        self.params["head.bias"] = zeros(IMAGE_VOCAB)

    def tensor_order(self):
        return list(self.params.keys())

    def forward(self, text, image_in):
        """text: (B, N) or None; image_in: (B, L) image-slot inputs.

        Returns logits (B, L, V): output at image slot k predicts image
        token k, where image slot 0 holds the begin-of-image embedding.
        """
        P = self.params
        B, L = image_in.shape
        parts = []
        n_text = 0
        if text is not None:
            n_text = text.shape[1]
            parts.append(P["embed.text"][text])
        parts.append(P["embed.boi"].expand(B, 1, D_MODEL))
        parts.append(P["embed.image"][image_in[:, : L - 1]])
        x = torch.cat(parts, dim=1)
        T = x.shape[1]
        x = x + P["embed.position"][:T]
        hd = D_MODEL // N_HEADS
        causal = torch.ones(T, T, dtype=torch.bool).tril()
        for l in range(N_LAYERS):
            pre = f"layers.{l}."
            h = F.layer_norm(x, (D_MODEL,), P[pre + "ln1.gain"], P[pre + "ln1.bias"], 1e-5)
            q = h @ P[pre + "attn.query.weight"] + P[pre + "attn.query.bias"]
            k = h @ P[pre + "attn.key.weight"] + P[pre + "attn.key.bias"]
            v = h @ P[pre + "attn.value.weight"] + P[pre + "attn.value.bias"]
            q = q.view(B, T, N_HEADS, hd).transpose(1, 2)
            k = k.view(B, T, N_HEADS, hd).transpose(1, 2)
            v = v.view(B, T, N_HEADS, hd).transpose(1, 2)
            s = (q @ k.transpose(-1, -2)) * (hd ** -0.5)
            s = s.masked_fill(~causal, float("-inf"))
            a = torch.softmax(s, dim=-1) @ v
            a = a.transpose(1, 2).reshape(B, T, D_MODEL)
            x = x + a @ P[pre + "attn.output.weight"] + P[pre + "attn.output.bias"]
            h = F.layer_norm(x, (D_MODEL,), P[pre + "ln2.gain"], P[pre + "ln2.bias"], 1e-5)
            f = torch.relu(h @ P[pre + "ffn.up.weight"] + P[pre + "ffn.up.bias"])
            x = x + f @ P[pre + "ffn.down.weight"] + P[pre + "ffn.down.bias"]
        x = F.layer_norm(x, (D_MODEL,), P["final_ln.gain"], P["final_ln.bias"], 1e-5)
        x = x[:, n_text:, :]
        return x @ P["head.weight"] + P["head.bias"]


def batch_loss(model, texts, images, rng):
    text = texts if model.mode == "textcond" else None
    if model.mode == "masked":
        ratio = torch.from_numpy(rng.uniform(0.1, 0.9, size=(images.shape[0], 1)))
        mask = torch.from_numpy(rng.random_sample(images.shape)) < ratio
        context = images.masked_fill(mask, IMAGE_VOCAB)
        logits = model(text, context)
        nll = F.cross_entropy(logits.reshape(-1, IMAGE_VOCAB), images.reshape(-1),
                              reduction="none").view(images.shape)
        keep = (~mask).float()
        return (nll * keep).sum() / keep.sum().clamp(min=1.0)
    logits = model(text, images)
    return F.cross_entropy(logits.reshape(-1, IMAGE_VOCAB), images.reshape(-1))


def train(mode, train_texts, train_images, held_texts, held_images, steps, seed):
    gen = torch.Generator().manual_seed(seed)
    model = TinyTransformer(mode, gen)
    opt = torch.optim.AdamW(model.parameters(), lr=3e-3, weight_decay=0.0)
    rng = np.random.RandomState(seed)
    tt = torch.from_numpy(train_texts)
    ti = torch.from_numpy(train_images)
    batch = 32
    warmup = 100
    t0 = time.time()
    for step in range(steps):
        lr = 3e-3 * min(1.0, (step + 1) / warmup) * 0.5 * (1 + math.cos(math.pi * step / steps))
        for g in opt.param_groups:
            g["lr"] = lr
        idx = torch.from_numpy(rng.randint(0, ti.shape[0], size=batch))
        loss = batch_loss(model, tt[idx], ti[idx], rng)
        opt.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
        opt.step()
        if step % 200 == 0 or step == steps - 1:
            print(f"[{mode}] step {step} loss {loss.item() / math.log(2):.4f} bits "
                  f"({time.time() - t0:.0f}s)", flush=True)
    with torch.no_grad():
        eval_rng = np.random.RandomState(1234)
        held = batch_loss(model, torch.from_numpy(held_texts),
                          torch.from_numpy(held_images), eval_rng).item() / math.log(2)
    print(f"[{mode}] held-out {held:.4f} bits/token", flush=True)
    return model


# ---------------------------------------------------------------- export


def crc32c(data):
    poly = 0x82F63B78
    table = []
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ poly if c & 1 else c >> 1
        table.append(c)
    crc = 0xFFFFFFFF
    for b in data:
        crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8)
    return crc ^ 0xFFFFFFFF


def export_umew(model, path):
    text_vocab = TEXT_VOCAB if model.mode == "textcond" else 0
    out = bytearray(b"UMEW")
    out += struct.pack("<BB", 1, MODES[model.mode])
    out += struct.pack("<6I", D_MODEL, N_LAYERS, N_HEADS, MAX_CONTEXT, IMAGE_VOCAB, text_vocab)
    names = model.tensor_order()
    out += struct.pack("<I", len(names))
    for name in names:
        t = model.params[name].detach().to(torch.float64).contiguous()
        out += struct.pack("<H", len(name)) + name.encode()
        out += struct.pack("<B", t.dim())
        out += struct.pack(f"<{t.dim()}I", *t.shape)
        out += t.numpy().astype("<f8").tobytes()
    out += struct.pack("<I", crc32c(bytes(out)))
    with open(path, "wb") as f:
        f.write(bytes(out))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "..", "fixtures"))
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--steps", type=int, default=1500)
    ap.add_argument("--train-size", type=int, default=20000)
    ap.add_argument("--heldout-size", type=int, default=256)
    ap.add_argument("--modes", default="ar,masked,textcond")
    args = ap.parse_args()
    torch.set_num_threads(1)

    rng = np.random.RandomState(args.seed)
    held_texts, held_images = generate_corpus(rng, args.heldout_size)
    train_texts, train_images = generate_corpus(rng, args.train_size)

    os.makedirs(os.path.join(args.out, "corpus"), exist_ok=True)
    os.makedirs(os.path.join(args.out, "weights"), exist_ok=True)
    write_umtk_records(os.path.join(args.out, "corpus", "heldout.text.umtk"), TEXT_VOCAB, held_texts)
    write_umtk_records(os.path.join(args.out, "corpus", "heldout.image.umtk"), IMAGE_VOCAB, held_images)

    for i, mode in enumerate(args.modes.split(",")):
        model = train(mode, train_texts, train_images, held_texts, held_images,
                      args.steps, args.seed * 100 + i)
        export_umew(model, os.path.join(args.out, "weights", f"w_{mode}.umew"))


if __name__ == "__main__":
    main()
