# gdr - dissipative discrete-gradient integrators
# Install first: pip install -r requirements.txt

from runtime.bootstrap import start

if __name__ == "__main__":
    start()
