"""Run the shim: python -m modelshim [--port N] [--embed-model ID] [--gen-model ID]."""

import argparse

import uvicorn

from modelshim.app import create_app
from modelshim.config import ShimConfig


def main() -> None:
    env = ShimConfig.from_env()
    parser = argparse.ArgumentParser(prog="modelshim")
    parser.add_argument("--port", type=int, default=env.port)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--embed-model", default=env.embed_model)
    parser.add_argument("--gen-model", default=env.gen_model)
    parser.add_argument("--max-batch", type=int, default=env.max_batch)
    parser.add_argument("--device", default=env.device)
    args = parser.parse_args()

    config = ShimConfig(
        embed_model=args.embed_model,
        gen_model=args.gen_model,
        port=args.port,
        max_batch=args.max_batch,
        device=args.device,
        token=env.token,
    )
    uvicorn.run(create_app(config), host=args.host, port=config.port)


if __name__ == "__main__":
    main()
